#include "jfab/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "jfab/dataset_io.hpp"

namespace jfab::cfg {

using nlohmann::json;

namespace {

// Best-effort line of the first occurrence of "key" in the raw text.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return -1;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

struct Checker {
  const std::string& raw;
  const std::string& origin;

  [[noreturn]] void fail(const std::string& key, const std::string& path) const {
    const int line = line_of_key(raw, key);
    std::ostringstream os;
    os << origin;
    if (line > 0) os << ":" << line;
    os << ": unknown key \"" << key << "\" in " << path;
    throw ConfigError(os.str());
  }

  void known(const json& obj, const std::string& path,
             const std::set<std::string>& allowed) const {
    if (!obj.is_object()) throw ConfigError(origin + ": " + path + " must be an object");
    for (const auto& [key, _] : obj.items())
      if (!allowed.count(key)) fail(key, path);
  }
};

double num(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

std::vector<std::pair<double, double>> pair_table(const json& j) {
  std::vector<std::pair<double, double>> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw ConfigError("table entries must be [x, y] pairs");
    out.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return out;
}

wafer::WaferLayout build_layout(const json& root, const Checker& chk) {
  wafer::WaferLayout base = wafer::WaferLayout::calibrated_default();

  wafer::WaferLayout wl;
  wl.groups = base.groups;
  if (root.contains("groups")) {
    wl.groups.clear();
    for (const auto& g : root.at("groups")) {
      chk.known(g, "groups[]", {"label", "bottom_nm", "length_nm"});
      wafer::MaskGroup mg;
      mg.label = g.at("label").get<std::string>();
      mg.bottom_nm = g.at("bottom_nm").get<double>();
      mg.length_nm = g.at("length_nm").get<double>();
      wl.groups.push_back(mg);
    }
    if (wl.groups.empty()) throw ConfigError("groups: must not be empty");
  }

  json lay = root.contains("layout") ? root.at("layout") : json::object();
  chk.known(lay, "layout", {"substrate_mm", "chips", "sites_per_chip"});
  wl.size_x_mm = 22.0;
  wl.size_y_mm = 22.0;
  if (lay.contains("substrate_mm")) {
    wl.size_x_mm = lay.at("substrate_mm").at(0).get<double>();
    wl.size_y_mm = lay.at("substrate_mm").at(1).get<double>();
  }

  if (lay.contains("chips")) {
    for (const auto& cj : lay.at("chips")) {
      chk.known(cj, "layout.chips[]", {"id", "origin_mm", "size_mm"});
      wafer::ChipSpec ch;
      ch.id = cj.at("id").get<std::string>();
      ch.x0_mm = cj.at("origin_mm").at(0).get<double>();
      ch.y0_mm = cj.at("origin_mm").at(1).get<double>();
      ch.w_mm = cj.at("size_mm").at(0).get<double>();
      ch.h_mm = cj.at("size_mm").at(1).get<double>();
      wl.chips.push_back(ch);
    }
  } else {
    wl.chips = base.chips;
  }

  int nx = 30, ny = 15;
  if (lay.contains("sites_per_chip")) {
    nx = lay.at("sites_per_chip").at(0).get<int>();
    ny = lay.at("sites_per_chip").at(1).get<int>();
    if (nx < 1 || ny < 1) throw ConfigError("layout.sites_per_chip: must be >= 1");
  }
  for (int ci = 0; ci < static_cast<int>(wl.chips.size()); ++ci) {
    const auto& ch = wl.chips[static_cast<std::size_t>(ci)];
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
        wl.sites.push_back({ci, ch.x0_mm + (ix + 0.5) * ch.w_mm / nx,
                            ch.y0_mm + (iy + 0.5) * ch.h_mm / ny,
                            (iy * nx + ix) % static_cast<int>(wl.groups.size())});
  }
  return wl;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // byte offset -> line number
    const std::size_t off = std::min<std::size_t>(e.byte, json_text.size());
    const int line = 1 + static_cast<int>(std::count(json_text.begin(),
                                                     json_text.begin() + off, '\n'));
    throw ConfigError(origin + ":" + std::to_string(line) + ": JSON parse error: " + e.what());
  }

  const Checker chk{json_text, origin};
  chk.known(root, "top level",
            {"seed", "stack", "mask", "groups", "layout", "writer", "width_noise", "evaporation",
             "source", "ler", "oxidation", "electrical"});

  RunConfig rc;
  if (root.contains("seed")) rc.seed = root.at("seed").get<std::uint64_t>();

  rc.sim = wafer::calibrated_config_45deg();  // section defaults
  rc.layout = build_layout(root, chk);

  if (root.contains("stack")) {
    const json& s = root.at("stack");
    chk.known(s, "stack", {"copolymer_nm", "top_resist_nm", "undercut_nm"});
    rc.sim.stack.copolymer_thickness_nm = num(s, "copolymer_nm", 500.0);
    rc.sim.stack.top_resist_thickness_nm = num(s, "top_resist_nm", 100.0);
    rc.sim.stack.undercut_nm = num(s, "undercut_nm", 200.0);
  }
  if (root.contains("mask")) {
    const json& m = root.at("mask");
    chk.known(m, "mask", {"bridge_nm", "top_window_nm", "tilt_axis"});
    rc.sim.bridge_nm = num(m, "bridge_nm", rc.sim.bridge_nm);
    rc.sim.top_window_nm = num(m, "top_window_nm", rc.sim.top_window_nm);
    if (m.contains("tilt_axis")) {
      const std::string axis = m.at("tilt_axis").get<std::string>();
      if (axis == "bottom")
        rc.sim.tilt_axis_is_bottom = true;
      else if (axis == "length")
        rc.sim.tilt_axis_is_bottom = false;
      else
        throw ConfigError(origin + ": mask.tilt_axis must be \"bottom\" or \"length\"");
    }
  }
  if (root.contains("writer")) {
    const json& w = root.at("writer");
    chk.known(w, "writer", {"field_size_um", "step_size_nm", "scan_direction", "model"});
    rc.sim.writer_cfg.field_size_um = num(w, "field_size_um", rc.sim.writer_cfg.field_size_um);
    rc.sim.writer_cfg.step_size_nm = num(w, "step_size_nm", rc.sim.writer_cfg.step_size_nm);
    if (w.contains("scan_direction"))
      rc.sim.writer_cfg.scan_direction =
          writer::scan_direction_from_string(w.at("scan_direction").get<std::string>());
    if (w.contains("model")) rc.sim.lw_model = writer::LwNoiseModel::from_json(w.at("model").dump());
  }
  if (root.contains("width_noise")) {
    const json& n = root.at("width_noise");
    chk.known(n, "width_noise",
              {"resist_sigma_nm", "spatial_fraction", "wall_coupling", "compensate_wall_mean",
               "size_factor"});
    rc.sim.width_noise.resist_sigma_nm = num(n, "resist_sigma_nm", rc.sim.width_noise.resist_sigma_nm);
    rc.sim.width_noise.spatial_fraction =
        num(n, "spatial_fraction", rc.sim.width_noise.spatial_fraction);
    rc.sim.width_noise.wall_coupling = num(n, "wall_coupling", rc.sim.width_noise.wall_coupling);
    if (n.contains("compensate_wall_mean"))
      rc.sim.width_noise.compensate_wall_mean = n.at("compensate_wall_mean").get<bool>();
    if (n.contains("size_factor")) rc.sim.width_noise.size_factor = pair_table(n.at("size_factor"));
  }
  if (root.contains("evaporation")) {
    const json& e = root.at("evaporation");
    chk.known(e, "evaporation", {"angle1_deg", "angle2_deg", "film1_nm", "film2_nm"});
    rc.sim.evap.first.angle_deg = num(e, "angle1_deg", rc.sim.evap.first.angle_deg);
    rc.sim.evap.second.angle_deg = num(e, "angle2_deg", rc.sim.evap.second.angle_deg);
    rc.sim.evap.first.film_thickness_nm = num(e, "film1_nm", rc.sim.evap.first.film_thickness_nm);
    rc.sim.evap.second.film_thickness_nm = num(e, "film2_nm", rc.sim.evap.second.film_thickness_nm);
  }
  if (root.contains("source")) {
    const json& s = root.at("source");
    chk.known(s, "source", {"distance_mm", "offset_mm", "azimuth_deg"});
    rc.sim.source.distance_mm = num(s, "distance_mm", rc.sim.source.distance_mm);
    if (s.contains("offset_mm")) {
      rc.sim.source.offset_x_mm = s.at("offset_mm").at(0).get<double>();
      rc.sim.source.offset_y_mm = s.at("offset_mm").at(1).get<double>();
    }
    rc.sim.source.tilt_azimuth_deg = num(s, "azimuth_deg", rc.sim.source.tilt_azimuth_deg);
  }
  if (root.contains("ler")) {
    const json& l = root.at("ler");
    chk.known(l, "ler", {"correlation_length_nm", "sigma_vs_angle_nm"});
    rc.sim.ler.correlation_length_nm =
        num(l, "correlation_length_nm", rc.sim.ler.correlation_length_nm);
    if (l.contains("sigma_vs_angle_nm"))
      rc.sim.ler.sigma_vs_angle_nm = pair_table(l.at("sigma_vs_angle_nm"));
  }
  if (root.contains("oxidation")) {
    const json& o = root.at("oxidation");
    chk.known(o, "oxidation", {"enabled", "grad_x_per_mm", "grad_y_per_mm", "sigma"});
    if (o.contains("enabled")) rc.sim.oxidation.enabled = o.at("enabled").get<bool>();
    rc.sim.oxidation.grad_x_per_mm = num(o, "grad_x_per_mm", rc.sim.oxidation.grad_x_per_mm);
    rc.sim.oxidation.grad_y_per_mm = num(o, "grad_y_per_mm", rc.sim.oxidation.grad_y_per_mm);
    rc.sim.oxidation.sigma = num(o, "sigma", rc.sim.oxidation.sigma);
  }
  if (root.contains("electrical")) {
    const json& e = root.at("electrical");
    chk.known(e, "electrical", {"gap_delta_uev", "ra_ohm_um2", "capacitance_ff"});
    rc.sim.electrical.gap_delta_uev = num(e, "gap_delta_uev", rc.sim.electrical.gap_delta_uev);
    rc.sim.electrical.ra_product_ohm_um2 = num(e, "ra_ohm_um2", rc.sim.electrical.ra_product_ohm_um2);
    rc.sim.electrical.capacitance_ff = num(e, "capacitance_ff", rc.sim.electrical.capacitance_ff);
  }

  try {
    rc.layout.validate();
    rc.sim.validate();
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  rc.config_hash = io::fnv1a_hex(dump_run_config(rc));
  return rc;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path);
}

std::string dump_run_config(const RunConfig& rc) {
  json j;
  j["seed"] = rc.seed;
  j["stack"] = {{"copolymer_nm", rc.sim.stack.copolymer_thickness_nm},
                {"top_resist_nm", rc.sim.stack.top_resist_thickness_nm},
                {"undercut_nm", rc.sim.stack.undercut_nm}};
  j["mask"] = {{"bridge_nm", rc.sim.bridge_nm},
               {"top_window_nm", rc.sim.top_window_nm},
               {"tilt_axis", rc.sim.tilt_axis_is_bottom ? "bottom" : "length"}};
  json groups = json::array();
  for (const auto& g : rc.layout.groups)
    groups.push_back({{"label", g.label}, {"bottom_nm", g.bottom_nm}, {"length_nm", g.length_nm}});
  j["groups"] = groups;
  json chips = json::array();
  for (const auto& ch : rc.layout.chips)
    chips.push_back({{"id", ch.id},
                     {"origin_mm", {ch.x0_mm, ch.y0_mm}},
                     {"size_mm", {ch.w_mm, ch.h_mm}}});
  j["layout"] = {{"substrate_mm", {rc.layout.size_x_mm, rc.layout.size_y_mm}},
                 {"chips", chips},
                 {"site_count", rc.layout.sites.size()}};
  j["writer"] = {{"field_size_um", rc.sim.writer_cfg.field_size_um},
                 {"step_size_nm", rc.sim.writer_cfg.step_size_nm},
                 {"scan_direction", writer::to_string(rc.sim.writer_cfg.scan_direction)},
                 {"model", json::parse(rc.sim.lw_model.to_json())}};
  j["width_noise"] = {{"resist_sigma_nm", rc.sim.width_noise.resist_sigma_nm},
                      {"spatial_fraction", rc.sim.width_noise.spatial_fraction},
                      {"wall_coupling", rc.sim.width_noise.wall_coupling},
                      {"compensate_wall_mean", rc.sim.width_noise.compensate_wall_mean},
                      {"size_factor", rc.sim.width_noise.size_factor}};
  j["evaporation"] = {{"angle1_deg", rc.sim.evap.first.angle_deg},
                      {"angle2_deg", rc.sim.evap.second.angle_deg},
                      {"film1_nm", rc.sim.evap.first.film_thickness_nm},
                      {"film2_nm", rc.sim.evap.second.film_thickness_nm}};
  j["source"] = {{"distance_mm", rc.sim.source.distance_mm},
                 {"offset_mm", {rc.sim.source.offset_x_mm, rc.sim.source.offset_y_mm}},
                 {"azimuth_deg", rc.sim.source.tilt_azimuth_deg}};
  j["ler"] = {{"correlation_length_nm", rc.sim.ler.correlation_length_nm},
              {"sigma_vs_angle_nm", rc.sim.ler.sigma_vs_angle_nm}};
  j["oxidation"] = {{"enabled", rc.sim.oxidation.enabled},
                    {"grad_x_per_mm", rc.sim.oxidation.grad_x_per_mm},
                    {"grad_y_per_mm", rc.sim.oxidation.grad_y_per_mm},
                    {"sigma", rc.sim.oxidation.sigma}};
  j["electrical"] = {{"gap_delta_uev", rc.sim.electrical.gap_delta_uev},
                     {"ra_ohm_um2", rc.sim.electrical.ra_product_ohm_um2},
                     {"capacitance_ff", rc.sim.electrical.capacitance_ff}};
  return j.dump(2);
}

RunConfig bundled_wafer_45deg() {
  RunConfig rc;
  rc.seed = 0;
  rc.layout = wafer::WaferLayout::calibrated_default();
  rc.sim = wafer::calibrated_config_45deg();
  rc.config_hash = io::fnv1a_hex(dump_run_config(rc));
  return rc;
}

RunConfig bundled_wafer_0deg() {
  RunConfig rc = bundled_wafer_45deg();
  rc.sim = wafer::calibrated_config_0deg();
  rc.config_hash = io::fnv1a_hex(dump_run_config(rc));
  return rc;
}

RunConfig bundled_overlay(double angle1_deg, double bottom_nm) {
  RunConfig rc;
  rc.seed = 0;
  wafer::MaskGroup group{"overlay", bottom_nm, 170.0};
  rc.layout = wafer::WaferLayout::uniform_grid(group, 100, 100);
  rc.sim = wafer::calibrated_config_overlay(angle1_deg);
  rc.config_hash = io::fnv1a_hex(dump_run_config(rc));
  return rc;
}

}  // namespace jfab::cfg
