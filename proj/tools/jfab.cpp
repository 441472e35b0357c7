// jfab: junction-fabrication variability simulator and dataset analyzer.
//
// Subcommands:
//   simulate   config-driven wafer simulation -> dataset CSV + reports
//   analyze    statistics over a dataset CSV (simulated or measured)
//   repro      bundled reference-experiment reproductions with PASS/FAIL
//   psf        Monte Carlo exposure point-spread simulation + fit
//   dose-map   proximity dose map over a rectangle layout

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "jfab/dataset_io.hpp"
#include "jfab/dose.hpp"
#include "jfab/grid_io.hpp"
#include "jfab/mc_psf.hpp"
#include "jfab/repro.hpp"
#include "jfab/run_config.hpp"
#include "jfab/stats.hpp"
#include "jfab/version.hpp"
#include "jfab/wafer.hpp"

namespace fs = std::filesystem;
using namespace jfab;

namespace {

struct GridShape {
  int nx = 10, ny = 10;
};

GridShape parse_grid(const std::string& s) {
  GridShape g;
  if (std::sscanf(s.c_str(), "%dx%d", &g.nx, &g.ny) != 2 || g.nx < 1 || g.ny < 1)
    throw std::runtime_error("--grid expects NxM, e.g. 10x10");
  return g;
}

void write_reports(const fs::path& out, const JunctionDataset& ds, const GridShape& grid,
                   double size_x_mm, double size_y_mm) {
  const auto report = stats::variation_report(ds);
  std::ofstream(out / "variation_report.txt") << report.to_text();
  std::ofstream(out / "variation_report.csv") << report.to_csv();

  std::optional<stats::AreaResistanceFit> fit;
  try {
    fit = stats::area_resistance_fit(ds);
  } catch (const std::exception&) {
    // dataset without usable resistances (e.g. all regime None)
  }
  if (fit) {
    std::ofstream f(out / "area_resistance_fit.txt");
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "loglog_slope %.4f\nr_pooled %.4f\nr_within_group %.4f\nn_used %d\nn_rejected %d\n",
                  fit->slope, fit->r_pooled, fit->r_within, fit->n_used, fit->n_rejected);
    f << buf;
  }

  std::set<std::string> groups;
  for (const auto& r : ds.records) groups.insert(r.group);
  for (const std::string& metric : {std::string("lw_top_nm"), std::string("r_ohm")}) {
    for (const auto& g : groups) {
      try {
        const auto hm = stats::heatmap(ds, stats::metric_by_name(metric), grid.nx, grid.ny,
                                       size_x_mm, size_y_mm, g);
        const std::string stem = "heatmap_" + metric + "_" + g;
        io::save_heatmap_csv((out / (stem + ".csv")).string(), hm);
        io::save_heatmap_pgm((out / (stem + ".pgm")).string(), hm);
        io::save_heatmap_svg((out / (stem + ".svg")).string(), hm, metric + " group " + g);
      } catch (const std::exception&) {
        // not enough occupied cells for this metric/group; skip the map
      }
    }
  }
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed_override, const GridShape& grid) {
  cfg::RunConfig rc =
      config_path.empty() ? cfg::bundled_wafer_45deg() : cfg::load_run_config(config_path);
  if (seed_override) rc.seed = *seed_override;
  rc.config_hash = io::fnv1a_hex(cfg::dump_run_config(rc));

  const fs::path out(out_dir);
  fs::create_directories(out);

  JunctionDataset ds = wafer::simulate_wafer(rc.layout, rc.sim, rc.seed);
  ds.meta.config_hash = rc.config_hash;

  io::save_dataset_csv((out / "dataset.csv").string(), ds);
  std::ofstream(out / "effective_config.json") << cfg::dump_run_config(rc) << "\n";
  io::save_metadata_json((out / "metadata.json").string(), "simulate", rc.seed, rc.config_hash);
  write_reports(out, ds, grid, rc.layout.size_x_mm, rc.layout.size_y_mm);

  std::cout << "simulate: " << ds.records.size() << " junctions -> " << out.string() << "\n";
  return 0;
}

int cmd_analyze(const std::string& csv_path, const std::string& out_dir, bool strict,
                const GridShape& grid) {
  io::CsvReadReport read_report;
  JunctionDataset ds = io::load_dataset_csv(csv_path, strict, &read_report);
  if (ds.records.empty()) throw std::runtime_error("dataset has no usable records");

  const fs::path out(out_dir);
  fs::create_directories(out);

  double max_x = 0.0, max_y = 0.0;
  for (const auto& r : ds.records) {
    max_x = std::max(max_x, r.x_mm);
    max_y = std::max(max_y, r.y_mm);
  }
  write_reports(out, ds, grid, std::max(1.0, max_x * 1.02), std::max(1.0, max_y * 1.02));

  {
    std::ofstream log(out / "analyze_log.txt");
    log << "rows_read " << read_report.rows_read << "\n";
    for (const auto& err : read_report.row_errors) log << "row_error " << err << "\n";
    const auto report = stats::variation_report(ds);
    for (const auto& g : report.groups)
      if (g.n_outliers > 0)
        log << "outliers group " << g.group << ": " << g.n_outliers << " removed by 3-sigma\n";
  }
  io::save_metadata_json((out / "metadata.json").string(), "analyze", ds.meta.seed,
                         io::fnv1a_hex(csv_path));
  for (const auto& err : read_report.row_errors) std::cerr << "warning: row " << err << "\n";
  std::cout << "analyze: " << ds.records.size() << " records -> " << out.string() << "\n";
  return 0;
}

int cmd_psf(const std::string& stack_name, std::int64_t electrons, std::uint64_t seed,
            double energy_kev, const std::string& out_dir) {
  std::vector<mcpsf::MaterialLayer> stack;
  if (stack_name == "si-bilayer")
    stack = mcpsf::silicon_bilayer_stack();
  else if (stack_name == "ge-bilayer")
    stack = mcpsf::germanium_bilayer_stack();
  else
    throw std::runtime_error("unknown stack preset: " + stack_name +
                             " (expected si-bilayer or ge-bilayer)");

  mcpsf::BeamConfig beam;
  beam.energy_kev = energy_kev;
  beam.electron_count = electrons;
  beam.rng_seed = seed;
  beam.validate();

  const fs::path out(out_dir);
  fs::create_directories(out);

  const auto hist = mcpsf::simulate_psf(stack, beam);
  mcpsf::save_histogram_csv((out / "psf_histogram.csv").string(), hist);
  io::save_metadata_json((out / "metadata.json").string(), "psf", seed,
                         io::fnv1a_hex(stack_name + std::to_string(electrons)));
  try {
    const auto fit = mcpsf::fit_double_gaussian(hist);
    mcpsf::save_psf_json((out / "psf_params.json").string(), fit, beam);
    std::printf("psf: alpha=%.4f um beta=%.3f um eta=%.3f -> %s\n", fit.params.alpha_fwd_um,
                fit.params.beta_back_um, fit.params.eta, out.string().c_str());
  } catch (const std::exception& e) {
    std::cerr << "psf fit failed: " << e.what() << " (histogram still written)\n";
    return 3;
  }
  return 0;
}

int cmd_dose_map(const std::string& layout_path, const std::string& preset_name,
                 const GridShape& grid, const std::string& window_spec,
                 const std::string& out_dir) {
  const auto layout =
      layout_path.empty() ? dose::reference_layout(true) : dose::load_layout(layout_path);
  const auto preset = dose::preset_by_name(preset_name);

  dose::Region window;
  if (window_spec.empty()) {
    double x0 = 1e30, y0 = 1e30, x1 = -1e30, y1 = -1e30;
    for (const auto& rc : layout) {
      x0 = std::min(x0, rc.x0_um);
      y0 = std::min(y0, rc.y0_um);
      x1 = std::max(x1, rc.x1_um);
      y1 = std::max(y1, rc.y1_um);
    }
    const double pad = 2.0;
    window = {x0 - pad, y0 - pad, x1 + pad, y1 + pad};
  } else if (std::sscanf(window_spec.c_str(), "%lf,%lf,%lf,%lf", &window.x0_um, &window.y0_um,
                         &window.x1_um, &window.y1_um) != 4) {
    throw std::runtime_error("--window expects x0,y0,x1,y1 in um");
  }

  const fs::path out(out_dir);
  fs::create_directories(out);
  const auto grid_vals = dose::dose_map(layout, preset.psf, window, grid.nx, grid.ny);

  std::ofstream f(out / "dose_map.csv");
  char buf[160];
  std::snprintf(buf, sizeof(buf), "# dose map %dx%d window_um=%.3f,%.3f,%.3f,%.3f preset=%s\n",
                grid.nx, grid.ny, window.x0_um, window.y0_um, window.x1_um, window.y1_um,
                preset.name.c_str());
  f << buf;
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      std::snprintf(buf, sizeof(buf), "%.6g",
                    grid_vals[static_cast<std::size_t>(iy) * grid.nx + ix]);
      f << (ix ? "," : "") << buf;
    }
    f << "\n";
  }
  io::save_metadata_json((out / "metadata.json").string(), "dose-map", 0,
                         io::fnv1a_hex(preset.name + window_spec));
  std::cout << "dose-map: " << grid.nx << "x" << grid.ny << " -> " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Josephson-junction fabrication variability toolkit"};
  app.set_version_flag("--version", std::string("jfab ") + kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", csv_path, grid_spec = "10x10";
  std::string repro_id, preset_name = "mma-pmma-a4", layout_path, window_spec;
  std::string stack_name = "si-bilayer";
  bool strict = false;
  std::optional<std::uint64_t> seed_flag;
  std::uint64_t psf_seed = 0;
  std::int64_t electrons = 100000;
  double energy_kev = 50.0;

  auto* sim = app.add_subcommand("simulate", "run a wafer simulation from a config");
  sim->add_option("--config", config_path, "run config JSON (default: bundled calibration)");
  sim->add_option("--seed", seed_flag, "override the config seed");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--grid", grid_spec, "heat-map grid, NxM");

  auto* ana = app.add_subcommand("analyze", "analyze a dataset CSV");
  ana->add_option("--csv", csv_path, "dataset CSV path")->required();
  ana->add_option("--out", out_dir, "output directory");
  ana->add_option("--grid", grid_spec, "heat-map grid, NxM");
  ana->add_flag("--strict", strict, "abort on the first malformed row");

  auto* rep = app.add_subcommand("repro", "reproduce a bundled reference experiment");
  rep->add_option("--id", repro_id, "experiment id")->required();
  rep->add_option("--out", out_dir, "output directory");
  rep->add_option("--seed", seed_flag, "seed (default 0)");

  auto* psf = app.add_subcommand("psf", "Monte Carlo exposure PSF simulation + fit");
  psf->add_option("--stack", stack_name, "si-bilayer or ge-bilayer");
  psf->add_option("--electrons", electrons, "electron count (>= 1e4)");
  psf->add_option("--seed", psf_seed, "RNG seed");
  psf->add_option("--energy", energy_kev, "beam energy, keV");
  psf->add_option("--out", out_dir, "output directory");

  auto* dmap = app.add_subcommand("dose-map", "proximity dose map over a layout");
  dmap->add_option("--layout", layout_path, "layout CSV/JSON (default: reference layout)");
  dmap->add_option("--preset", preset_name, "resist preset");
  dmap->add_option("--grid", grid_spec, "grid, NxM");
  dmap->add_option("--window", window_spec, "x0,y0,x1,y1 in um (default: layout bbox + 2um)");
  dmap->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    const GridShape grid = parse_grid(grid_spec);
    if (sim->parsed()) return cmd_simulate(config_path, out_dir, seed_flag, grid);
    if (ana->parsed()) return cmd_analyze(csv_path, out_dir, strict, grid);
    if (rep->parsed()) return repro::run_repro(repro_id, out_dir, seed_flag.value_or(0));
    if (psf->parsed()) return cmd_psf(stack_name, electrons, psf_seed, energy_kev, out_dir);
    if (dmap->parsed()) return cmd_dose_map(layout_path, preset_name, grid, window_spec, out_dir);
  } catch (const cfg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
