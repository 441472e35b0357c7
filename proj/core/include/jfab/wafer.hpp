#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jfab/dataset.hpp"
#include "jfab/electrical.hpp"
#include "jfab/geometry.hpp"
#include "jfab/rng.hpp"
#include "jfab/writer.hpp"

namespace jfab::wafer {

struct ChipSpec {
  std::string id;
  double x0_mm = 0.0, y0_mm = 0.0;
  double w_mm = 10.0, h_mm = 5.0;
};

struct MaskGroup {
  std::string label;         // e.g. "0.025"
  double bottom_nm = 150.0;  // tilt-axis window (bottom electrode extent)
  double length_nm = 170.0;  // transverse linewidth (top electrode)
};

struct SiteSpec {
  int chip_index = 0;
  double x_mm = 0.0, y_mm = 0.0;
  int group_index = 0;
};

struct WaferLayout {
  double size_x_mm = 22.0, size_y_mm = 22.0;
  std::vector<ChipSpec> chips;
  std::vector<MaskGroup> groups;
  std::vector<SiteSpec> sites;

  void validate() const;  // sites inside chips, chips inside substrate

  // Six 10x5 mm chips in a 2x3 grid on a 22x22 mm substrate; every chip
  // carries an interleaved row pattern of all five area groups so each
  // group spans the whole substrate (per-group chip and inter-chip
  // statistics need every group on every chip). 2700 sites.
  static WaferLayout calibrated_default();
  // Single-group dense grid, for regime studies.
  static WaferLayout uniform_grid(const MaskGroup& group, int nx, int ny);
};

// Point evaporation source: junctions away from the wafer center see the
// beam under a slightly different angle. The stage is re-registered between
// the two depositions, so the second film's deviation field is rotated by
// film2_azimuth_offset_deg (180 = anti-correlated along the tilt axis);
// with 0 the deviations cancel in the shift difference and partial overlay
// would be almost as stable as full overlay.
struct SourceModel {
  double distance_mm = 600.0;
  double offset_x_mm = 0.0, offset_y_mm = 0.0;
  double tilt_azimuth_deg = 0.0;  // direction along which the tilt varies
  double film2_azimuth_offset_deg = 180.0;

  void validate() const;
};

// Edge roughness vs. first-deposition angle, plus the correlation length of
// the edge process.
struct LerModel {
  std::vector<std::pair<double, double>> sigma_vs_angle_nm = {
      {0.0, 2.0}, {30.0, 2.0}, {40.0, 3.0}, {45.0, 4.0},
      {50.0, 5.5}, {55.0, 7.0}, {62.0, 9.0}, {75.0, 14.0}};
  double correlation_length_nm = 30.0;

  void validate() const;
  double sigma_nm(double angle_deg) const;  // linear interpolation, clamped
};

// Optional multiplicative resistance-area inhomogeneity: plane + white
// noise. Disabled unless a calibration explicitly turns it on.
struct OxidationModel {
  bool enabled = false;
  double grad_x_per_mm = 0.0;
  double grad_y_per_mm = 0.0;
  double sigma = 0.0;
};

// Width-realization noise beyond the writer model.
struct WidthNoiseModel {
  // Extra iid width noise (resist thickness / development), nm.
  double resist_sigma_nm = 1.1;
  // Linewidth-dependent scaling of the writer sigma, anchored at 100 nm.
  std::vector<std::pair<double, double>> size_factor = {
      {100.0, 1.0}, {150.0, 1.3}, {300.0, 1.42}, {500.0, 1.55}};
  // Fraction of the writer sigma carried by per-chip write-session offsets
  // rather than per-site noise.
  double spatial_fraction = 0.78;
  // Mask sidewall coating by the first (angled) film narrows the apertures
  // for the second film: delta_w = -kappa * t1 * |tan(angle)|. The nominal
  // part is compensated in the exposure, so only the local-angle deviation
  // remains.
  double wall_coupling = 3.0;
  bool compensate_wall_mean = true;

  double size_factor_at(double width_nm) const;  // log-log interpolation
};

struct EvaporationPair {
  geom::EvaporationStep first{45.0, 25.0};
  geom::EvaporationStep second{0.0, 45.0};
};

struct SimulationConfig {
  geom::StackGeometry stack;
  double bridge_nm = 150.0;
  double top_window_nm = 600.0;
  // Convention flag: true maps group.bottom_nm onto the tilt axis; false
  // swaps the two mask dimensions.
  bool tilt_axis_is_bottom = true;
  EvaporationPair evap;
  writer::WriterConfig writer_cfg;
  writer::LwNoiseModel lw_model;
  WidthNoiseModel width_noise;
  SourceModel source;
  LerModel ler;
  OxidationModel oxidation;
  elec::ElectricalParams electrical;

  void validate() const;
};

// Local first/second-deposition angle at a wafer position:
// nominal + atan(projection of (pos - center + offset) on the azimuth / D).
double local_evap_angle_deg(const SourceModel& source, double nominal_deg, double x_mm,
                            double y_mm, double center_x_mm, double center_y_mm);

// Stationary Gaussian edge profile with exponential autocorrelation
// (AR(1) on a uniform grid) and marginal sigma from the LER table.
std::vector<double> sample_edge_nm(double length_nm, const LerModel& ler, double angle_deg,
                                   StreamRng& rng, double sample_spacing_nm = 0.0);

// Standard deviation of edge offsets about the least-squares line.
// Requires at least 8 points.
double ler_sigma_nm(std::span<const double> profile_nm);

// Effective width-noise sigma contributed by edge roughness after averaging
// over an edge of length L: sigma * min(1, sqrt(xi / L)).
double ler_width_sigma_nm(const LerModel& ler, double angle_deg, double edge_length_nm);

// Per-chip write-session offsets: a checkerboard pattern over the chip
// grid, orthogonalized against any plane in the chip centers and normalized
// to unit sample variance. Zero when the layout cannot support it (fewer
// than 4 chips). Index i is the chip index.
std::vector<double> chip_drift_pattern(const WaferLayout& layout);

// Full stochastic wafer: writer noise, LER, source-angle gradient, optional
// RA field, composed through the overlay geometry into one record per site.
// Deterministic for a given seed regardless of JF_THREADS.
JunctionDataset simulate_wafer(const WaferLayout& layout, const SimulationConfig& cfg,
                               std::uint64_t seed);

// Calibrated defaults used by the bundled experiment reproductions.
SimulationConfig calibrated_config_45deg();   // angled first deposition, RA field on
SimulationConfig calibrated_config_0deg();    // both depositions nominal 0
SimulationConfig calibrated_config_overlay(double angle1_deg);  // RA field off

}  // namespace jfab::wafer
