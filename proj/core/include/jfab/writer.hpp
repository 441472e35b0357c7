#pragma once

#include <map>
#include <string>
#include <vector>

#include "jfab/rng.hpp"

namespace jfab::writer {

enum class ScanDirection { Along, Across };

const char* to_string(ScanDirection d);
ScanDirection scan_direction_from_string(const std::string& s);

// Studied operating points; other values work but are flagged as
// extrapolated.
struct WriterConfig {
  double field_size_um = 100.0;   // studied: 50, 100, 200, 500
  double step_size_nm = 2.0;      // studied: 2, 3, 5
  ScanDirection scan_direction = ScanDirection::Along;

  void validate() const;
  bool extrapolated() const;
};

// Calibrated linewidth realization model.
//  - sigma3 vs field size: looked up with flat extrapolation below the first
//    knot and above the last, log-linear interpolation in between.
//  - per-direction constant bias and quantization granularity. A
//    granularity of 0 means "use the configured step size".
struct LwNoiseModel {
  std::map<double, double> sigma3_by_field_size_nm = {{50.0, 7.1}, {100.0, 7.1}, {500.0, 17.4}};
  std::map<double, double> placement_max_by_field_size_nm = {{200.0, 33.0}, {500.0, 41.0}};
  double bias_along_nm = -1.0;
  double bias_across_nm = -4.0;
  double quantization_along_nm = 5.0;
  double quantization_across_nm = 0.0;  // 0 -> step size

  void validate() const;
  static LwNoiseModel calibrated_default() { return LwNoiseModel{}; }

  std::string to_json() const;
  static LwNoiseModel from_json(const std::string& text);
};

// 3-sigma linewidth variation for a write-field size, nm.
double lw_3sigma_nm(const LwNoiseModel& model, double field_size_um);

// Maximum placement deviation for a write-field size, nm (same lookup rule).
double placement_max_nm(const LwNoiseModel& model, double field_size_um);

double bias_nm(const LwNoiseModel& model, ScanDirection dir);
double quantization_nm(const LwNoiseModel& model, const WriterConfig& cfg);

// Grid snap used by the realization model: floor to the granularity. The
// calibration tables only reproduce the measured means with floor snapping
// (e.g. a 103 nm request lands on the 100 nm cell of the 5 nm along-scan
// grid).
double quantize_down_nm(double nominal_nm, double granularity_nm);

// Deterministic part of the realized linewidth: quantize + bias.
double realized_mean_nm(double nominal_nm, const WriterConfig& cfg, const LwNoiseModel& model);

// realized = mean + Gaussian(0, lw_3sigma/3). Throws for nominal <= 0.
double realized_linewidth_nm(double nominal_nm, const WriterConfig& cfg,
                             const LwNoiseModel& model, StreamRng& rng);

// Minimum step from the pattern-generator clock: sqrt(I / (D * f)),
// rounded to 0.1 nm.
double calc_min_step_nm(double clock_mhz, double dose_uc_cm2, double current_pa);

}  // namespace jfab::writer
