#include "jfab/wafer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jfab/constants.hpp"
#include "jfab/parallel.hpp"

namespace jfab::wafer {

namespace c = jfab::constants;

void WaferLayout::validate() const {
  if (!(size_x_mm > 0.0) || !(size_y_mm > 0.0))
    throw std::invalid_argument("WaferLayout: substrate size must be > 0");
  if (chips.empty()) throw std::invalid_argument("WaferLayout: no chips");
  if (groups.empty()) throw std::invalid_argument("WaferLayout: no mask groups");
  if (sites.empty()) throw std::invalid_argument("WaferLayout: no sites");
  for (const auto& ch : chips) {
    if (ch.x0_mm < 0 || ch.y0_mm < 0 || ch.x0_mm + ch.w_mm > size_x_mm ||
        ch.y0_mm + ch.h_mm > size_y_mm)
      throw std::invalid_argument("WaferLayout: chip " + ch.id + " outside the substrate");
  }
  for (const auto& g : groups) {
    if (!(g.bottom_nm > 0.0) || !(g.length_nm > 0.0))
      throw std::invalid_argument("WaferLayout: group " + g.label + " has nonpositive dims");
  }
  for (const auto& s : sites) {
    if (s.chip_index < 0 || s.chip_index >= static_cast<int>(chips.size()))
      throw std::invalid_argument("WaferLayout: site chip index out of range");
    if (s.group_index < 0 || s.group_index >= static_cast<int>(groups.size()))
      throw std::invalid_argument("WaferLayout: site group index out of range");
    const auto& ch = chips[static_cast<std::size_t>(s.chip_index)];
    if (s.x_mm < ch.x0_mm || s.x_mm > ch.x0_mm + ch.w_mm || s.y_mm < ch.y0_mm ||
        s.y_mm > ch.y0_mm + ch.h_mm)
      throw std::invalid_argument("WaferLayout: site outside its chip");
  }
}

WaferLayout WaferLayout::calibrated_default() {
  WaferLayout wl;
  wl.groups = {
      {"0.008", 90.0, 90.0},   {"0.010", 95.0, 105.0}, {"0.012", 100.0, 125.0},
      {"0.025", 150.0, 170.0}, {"0.120", 170.0, 680.0},
  };
  const double chip_w = 10.0, chip_h = 5.0;
  const double x_orgs[] = {0.7, 11.3};
  const double y_orgs[] = {2.8, 8.5, 14.2};
  int chip_idx = 0;
  for (double yo : y_orgs) {
    for (double xo : x_orgs) {
      ChipSpec ch;
      ch.id = "C" + std::to_string(chip_idx + 1);
      ch.x0_mm = xo;
      ch.y0_mm = yo;
      ch.w_mm = chip_w;
      ch.h_mm = chip_h;
      wl.chips.push_back(ch);
      // 30 x 15 site grid; rows cycle through the groups so every group
      // covers the full chip (and wafer) extent.
      const int nx = 30, ny = 15;
      for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
          SiteSpec s;
          s.chip_index = chip_idx;
          s.x_mm = xo + (ix + 0.5) * chip_w / nx;
          s.y_mm = yo + (iy + 0.5) * chip_h / ny;
          s.group_index = (iy * nx + ix) % 5;
          wl.sites.push_back(s);
        }
      }
      chip_idx++;
    }
  }
  return wl;
}

WaferLayout WaferLayout::uniform_grid(const MaskGroup& group, int nx, int ny) {
  WaferLayout wl;
  wl.groups = {group};
  ChipSpec ch;
  ch.id = "C1";
  ch.x0_mm = 1.0;
  ch.y0_mm = 1.0;
  ch.w_mm = wl.size_x_mm - 2.0;
  ch.h_mm = wl.size_y_mm - 2.0;
  wl.chips.push_back(ch);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      wl.sites.push_back(
          {0, ch.x0_mm + (ix + 0.5) * ch.w_mm / nx, ch.y0_mm + (iy + 0.5) * ch.h_mm / ny, 0});
  return wl;
}

void SourceModel::validate() const {
  if (!(distance_mm > 0.0)) throw std::invalid_argument("SourceModel: distance must be > 0");
}

void LerModel::validate() const {
  if (sigma_vs_angle_nm.empty()) throw std::invalid_argument("LerModel: empty table");
  double prev_angle = -1.0;
  double sigma_at_45 = -1.0;
  for (const auto& [angle, sigma] : sigma_vs_angle_nm) {
    if (sigma < 0.0) throw std::invalid_argument("LerModel: sigma must be >= 0");
    if (angle <= prev_angle) throw std::invalid_argument("LerModel: angles must be increasing");
    prev_angle = angle;
    if (angle >= 45.0) {
      if (sigma_at_45 >= 0.0 && sigma < sigma_at_45)
        throw std::invalid_argument("LerModel: sigma must not decrease above 45 degrees");
      sigma_at_45 = sigma;
    }
  }
  if (!(correlation_length_nm > 0.0))
    throw std::invalid_argument("LerModel: correlation length must be > 0");
}

double LerModel::sigma_nm(double angle_deg) const {
  const double a = std::abs(angle_deg);
  if (a <= sigma_vs_angle_nm.front().first) return sigma_vs_angle_nm.front().second;
  if (a >= sigma_vs_angle_nm.back().first) return sigma_vs_angle_nm.back().second;
  for (std::size_t i = 1; i < sigma_vs_angle_nm.size(); ++i) {
    if (a <= sigma_vs_angle_nm[i].first) {
      const auto& [a0, s0] = sigma_vs_angle_nm[i - 1];
      const auto& [a1, s1] = sigma_vs_angle_nm[i];
      return s0 + (s1 - s0) * (a - a0) / (a1 - a0);
    }
  }
  return sigma_vs_angle_nm.back().second;
}

double WidthNoiseModel::size_factor_at(double width_nm) const {
  if (size_factor.empty()) return 1.0;
  if (width_nm <= size_factor.front().first) return size_factor.front().second;
  if (width_nm >= size_factor.back().first) return size_factor.back().second;
  for (std::size_t i = 1; i < size_factor.size(); ++i) {
    if (width_nm <= size_factor[i].first) {
      const auto& [w0, f0] = size_factor[i - 1];
      const auto& [w1, f1] = size_factor[i];
      const double t = (std::log(width_nm) - std::log(w0)) / (std::log(w1) - std::log(w0));
      return f0 * std::pow(f1 / f0, t);
    }
  }
  return size_factor.back().second;
}

void SimulationConfig::validate() const {
  stack.validate();
  if (!(bridge_nm > 0.0) || !(top_window_nm > 0.0))
    throw std::invalid_argument("SimulationConfig: bridge and top window must be > 0");
  evap.first.validate();
  evap.second.validate();
  writer_cfg.validate();
  lw_model.validate();
  source.validate();
  ler.validate();
  electrical.validate();
  if (width_noise.resist_sigma_nm < 0.0 || width_noise.wall_coupling < 0.0 ||
      width_noise.spatial_fraction < 0.0 || width_noise.spatial_fraction > 1.0)
    throw std::invalid_argument("SimulationConfig: invalid width noise parameters");
  if (oxidation.enabled && oxidation.sigma < 0.0)
    throw std::invalid_argument("SimulationConfig: oxidation sigma must be >= 0");
}

double local_evap_angle_deg(const SourceModel& source, double nominal_deg, double x_mm,
                            double y_mm, double center_x_mm, double center_y_mm) {
  source.validate();
  const double az = source.tilt_azimuth_deg * c::kDegToRad;
  const double dx = x_mm - center_x_mm + source.offset_x_mm;
  const double dy = y_mm - center_y_mm + source.offset_y_mm;
  const double proj = dx * std::cos(az) + dy * std::sin(az);
  return nominal_deg + std::atan(proj / source.distance_mm) * c::kRadToDeg;
}

std::vector<double> sample_edge_nm(double length_nm, const LerModel& ler, double angle_deg,
                                   StreamRng& rng, double sample_spacing_nm) {
  if (!(length_nm > 0.0)) throw std::invalid_argument("sample_edge: length must be > 0");
  ler.validate();
  const double xi = ler.correlation_length_nm;
  double dx = sample_spacing_nm > 0.0 ? sample_spacing_nm : xi / 4.0;
  std::size_t n = static_cast<std::size_t>(std::ceil(length_nm / dx)) + 1;
  n = std::clamp<std::size_t>(n, 8, 1 << 16);
  dx = length_nm / static_cast<double>(n - 1);

  const double sigma = ler.sigma_nm(angle_deg);
  std::vector<double> profile(n, 0.0);
  if (sigma == 0.0) return profile;

  const double rho = std::exp(-dx / xi);
  const double innov = sigma * std::sqrt(1.0 - rho * rho);
  profile[0] = sigma * rng.normal();
  for (std::size_t i = 1; i < n; ++i) profile[i] = rho * profile[i - 1] + innov * rng.normal();
  return profile;
}

double ler_sigma_nm(std::span<const double> profile_nm) {
  const std::size_t n = profile_nm.size();
  if (n < 8) throw std::invalid_argument("ler_sigma: need at least 8 points");
  // Least-squares line removal, then the residual standard deviation.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += profile_nm[i];
    sxx += x * x;
    sxy += x * profile_nm[i];
  }
  const double nn = static_cast<double>(n);
  const double det = nn * sxx - sx * sx;
  const double slope = (nn * sxy - sx * sy) / det;
  const double icept = (sy - slope * sx) / nn;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = profile_nm[i] - (icept + slope * static_cast<double>(i));
    ss += r * r;
  }
  return std::sqrt(ss / nn);
}

double ler_width_sigma_nm(const LerModel& ler, double angle_deg, double edge_length_nm) {
  const double sigma = ler.sigma_nm(angle_deg);
  if (!(edge_length_nm > 0.0)) return sigma;
  const double atten = std::sqrt(ler.correlation_length_nm / edge_length_nm);
  return sigma * std::min(1.0, atten);
}

std::vector<double> chip_drift_pattern(const WaferLayout& layout) {
  const std::size_t n = layout.chips.size();
  std::vector<double> v(n, 0.0);
  if (n < 4) return v;

  // Checkerboard over the chip grid ranks.
  std::vector<double> xs, ys;
  for (const auto& ch : layout.chips) {
    xs.push_back(ch.x0_mm + ch.w_mm / 2);
    ys.push_back(ch.y0_mm + ch.h_mm / 2);
  }
  auto rank = [](const std::vector<double>& vals, double v) {
    int r = 0;
    for (double u : vals)
      if (u < v - 1e-9) ++r;
    return r;
  };
  std::vector<double> sx = xs, sy = ys;
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  sx.erase(std::unique(sx.begin(), sx.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-9; }),
           sx.end());
  sy.erase(std::unique(sy.begin(), sy.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-9; }),
           sy.end());
  for (std::size_t i = 0; i < n; ++i)
    v[i] = ((rank(sx, xs[i]) + rank(sy, ys[i])) % 2 == 0) ? 1.0 : -1.0;

  // Project out {1, x, y} so the pattern never contributes a plane, then
  // normalize the sample variance to 1.
  std::vector<std::vector<double>> basis;
  basis.emplace_back(n, 1.0);
  basis.push_back(xs);
  basis.push_back(ys);
  for (std::size_t k = 1; k < basis.size(); ++k) {
    double m = 0.0;
    for (double u : basis[k]) m += u / static_cast<double>(n);
    for (double& u : basis[k]) u -= m;
  }
  for (const auto& b : basis) {
    double bb = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      bb += b[i] * b[i];
      vb += v[i] * b[i];
    }
    if (bb > 1e-12)
      for (std::size_t i = 0; i < n; ++i) v[i] -= vb / bb * b[i];
  }
  double var = 0.0;
  for (double u : v) var += u * u;
  var /= static_cast<double>(n > 1 ? n - 1 : 1);
  if (var < 1e-12) return std::vector<double>(n, 0.0);
  const double scale = 1.0 / std::sqrt(var);
  for (double& u : v) u *= scale;
  return v;
}

namespace {

// Fixed per-site draw layout; every configuration consumes the same stream
// positions so runs with different settings stay draw-aligned.
struct SiteDraws {
  double writer_b, writer_l, writer_tw, writer_w0;
  double resist_b, resist_l;
  double ler_b, ler_l;
  double ox;
};

SiteDraws draw_site(StreamRng& rng) {
  SiteDraws d;
  d.writer_b = rng.normal();
  d.writer_l = rng.normal();
  d.writer_tw = rng.normal();
  d.writer_w0 = rng.normal();
  d.resist_b = rng.normal();
  d.resist_l = rng.normal();
  d.ler_b = rng.normal();
  d.ler_l = rng.normal();
  d.ox = rng.normal();
  return d;
}

}  // namespace

JunctionDataset simulate_wafer(const WaferLayout& layout, const SimulationConfig& cfg,
                               std::uint64_t seed) {
  layout.validate();
  cfg.validate();

  const double cx = layout.size_x_mm / 2.0;
  const double cy = layout.size_y_mm / 2.0;
  const double iid_frac =
      std::sqrt(std::max(0.0, 1.0 - cfg.width_noise.spatial_fraction * cfg.width_noise.spatial_fraction));
  const std::vector<double> chip_drift = chip_drift_pattern(layout);
  SourceModel source2 = cfg.source;
  source2.tilt_azimuth_deg += cfg.source.film2_azimuth_offset_deg;

  JunctionDataset ds;
  ds.meta.source = "simulated";
  ds.meta.seed = seed;
  ds.records.resize(layout.sites.size());

  constexpr std::int64_t kChunk = 256;
  const std::int64_t n_sites = static_cast<std::int64_t>(layout.sites.size());
  const std::int64_t n_chunks = (n_sites + kChunk - 1) / kChunk;

  parallel_for_chunks(n_chunks, [&](std::int64_t ci) {
    const std::int64_t begin = ci * kChunk;
    const std::int64_t end = std::min(begin + kChunk, n_sites);
    for (std::int64_t si = begin; si < end; ++si) {
      const SiteSpec& site = layout.sites[static_cast<std::size_t>(si)];
      const MaskGroup& group = layout.groups[static_cast<std::size_t>(site.group_index)];

      StreamRng rng(seed, static_cast<std::uint64_t>(si));
      const SiteDraws draws = draw_site(rng);

      const double a1_loc = local_evap_angle_deg(cfg.source, cfg.evap.first.angle_deg,
                                                 site.x_mm, site.y_mm, cx, cy);
      const double a2_loc = local_evap_angle_deg(source2, cfg.evap.second.angle_deg,
                                                 site.x_mm, site.y_mm, cx, cy);
      const double drift = chip_drift[static_cast<std::size_t>(site.chip_index)];

      // Wall coating from the first film narrows the apertures the second
      // film passes through. The nominal part is assumed compensated in the
      // exposure layout; the local-angle deviation is not.
      double wall_nm = cfg.width_noise.wall_coupling * cfg.evap.first.film_thickness_nm *
                       std::abs(std::tan(a1_loc * c::kDegToRad));
      if (cfg.width_noise.compensate_wall_mean)
        wall_nm -= cfg.width_noise.wall_coupling * cfg.evap.first.film_thickness_nm *
                   std::abs(std::tan(cfg.evap.first.angle_deg * c::kDegToRad));

      auto realize_width = [&](double nominal_nm, double edge_length_nm, bool second_film,
                               double g_writer, double g_resist, double g_ler) {
        const double mean = writer::realized_mean_nm(nominal_nm, cfg.writer_cfg, cfg.lw_model);
        const double sw = writer::lw_3sigma_nm(cfg.lw_model, cfg.writer_cfg.field_size_um) / 3.0 *
                          cfg.width_noise.size_factor_at(nominal_nm);
        double w = mean;
        w += sw * (iid_frac * g_writer + cfg.width_noise.spatial_fraction * drift);
        w += cfg.width_noise.resist_sigma_nm * g_resist;
        w += ler_width_sigma_nm(cfg.ler, a1_loc, edge_length_nm) * g_ler;
        if (second_film) w -= wall_nm;
        return std::max(1.0, w);
      };

      // Map group dims onto the tilt axis per the layout convention.
      const double nom_tilt = cfg.tilt_axis_is_bottom ? group.bottom_nm : group.length_nm;
      const double nom_transverse = cfg.tilt_axis_is_bottom ? group.length_nm : group.bottom_nm;

      const double w_tilt =
          realize_width(nom_tilt, nom_transverse, false, draws.writer_b, draws.resist_b, draws.ler_b);
      const double w_trans = realize_width(nom_transverse, nom_tilt, true, draws.writer_l,
                                           draws.resist_l, draws.ler_l);
      const double w_top_window =
          std::max(1.0, cfg.top_window_nm +
                            writer::lw_3sigma_nm(cfg.lw_model, cfg.writer_cfg.field_size_um) / 3.0 *
                                cfg.width_noise.size_factor_at(cfg.top_window_nm) * draws.writer_tw);
      const double w_bridge =
          std::max(1.0, cfg.bridge_nm +
                            writer::lw_3sigma_nm(cfg.lw_model, cfg.writer_cfg.field_size_um) / 3.0 *
                                cfg.width_noise.size_factor_at(cfg.bridge_nm) * draws.writer_w0);

      geom::DolanMask mask;
      mask.bridge_width_nm = w_bridge;
      mask.bottom_window_nm = w_tilt;
      mask.top_window_nm = w_top_window;
      mask.junction_length_nm = w_trans;

      geom::EvaporationStep e1 = cfg.evap.first;
      geom::EvaporationStep e2 = cfg.evap.second;
      e1.angle_deg = a1_loc;
      e2.angle_deg = a2_loc;

      const geom::OverlayResult ov = geom::overlay(cfg.stack, mask, e1, e2);

      JunctionRecord rec;
      rec.chip_id = layout.chips[static_cast<std::size_t>(site.chip_index)].id;
      rec.x_mm = site.x_mm;
      rec.y_mm = site.y_mm;
      rec.group = group.label;
      rec.nom_w_nm = nom_tilt;
      rec.nom_l_nm = nom_transverse;
      rec.lw_bot_nm = w_tilt;
      rec.lw_top_nm = w_trans;
      rec.regime = ov.regime;
      rec.area_um2 = ov.area_um2;

      if (ov.regime != geom::OverlapRegime::None && ov.area_um2 > 0.0) {
        double r = cfg.electrical.ra_product_ohm_um2 / ov.area_um2;
        if (cfg.oxidation.enabled) {
          const double factor = 1.0 + cfg.oxidation.grad_x_per_mm * (site.x_mm - cx) +
                                cfg.oxidation.grad_y_per_mm * (site.y_mm - cy) +
                                cfg.oxidation.sigma * draws.ox;
          r *= std::max(0.05, factor);
        }
        rec.r_ohm = r;
      } else {
        rec.regime = geom::OverlapRegime::None;
        rec.area_um2 = 0.0;
        rec.r_ohm = 0.0;
      }
      ds.records[static_cast<std::size_t>(si)] = std::move(rec);
    }
  });

  return ds;
}

SimulationConfig calibrated_config_45deg() {
  SimulationConfig cfg;
  cfg.evap.first = {45.0, 25.0};
  cfg.evap.second = {0.0, 45.0};
  cfg.source.distance_mm = 500.0;
  cfg.source.tilt_azimuth_deg = 30.0;
  cfg.ler.correlation_length_nm = 10.0;
  cfg.oxidation.enabled = true;
  cfg.oxidation.grad_x_per_mm = 0.00548;
  cfg.oxidation.grad_y_per_mm = 0.00317;
  cfg.oxidation.sigma = 0.010;
  return cfg;
}

SimulationConfig calibrated_config_0deg() {
  SimulationConfig cfg = calibrated_config_45deg();
  cfg.evap.first.angle_deg = 0.0;
  return cfg;
}

SimulationConfig calibrated_config_overlay(double angle1_deg) {
  SimulationConfig cfg = calibrated_config_45deg();
  cfg.evap.first.angle_deg = angle1_deg;
  cfg.oxidation = OxidationModel{};  // geometry-only comparison
  return cfg;
}

}  // namespace jfab::wafer
