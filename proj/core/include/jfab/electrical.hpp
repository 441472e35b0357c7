#pragma once

#include <cstdint>

#include "jfab/dataset.hpp"

namespace jfab::elec {

// Material / circuit constants for the area -> Rn -> Ic -> Ej -> f01 chain.
// gap and RA are process configuration; RA can be recalibrated from a
// measured dataset with calibrate_ra_ohm_um2().
struct ElectricalParams {
  double gap_delta_uev = 180.0;   // superconducting gap
  double ra_product_ohm_um2 = 150.0;
  double capacitance_ff = 80.0;

  void validate() const;
};

struct JunctionElectrical {
  double rn_ohm = 0.0;
  double ic_na = 0.0;
  double ej_over_h_ghz = 0.0;
};

struct SquidPair {
  double area_small_um2 = 0.0;
  double area_large_um2 = 0.0;
};

// Rn = RA / A. Throws for area <= 0.
double rn_from_area_ohm(double area_um2, const ElectricalParams& p);

// Zero-temperature tunnel-junction relation Ic = pi * Delta / (2 e Rn).
double ic_from_rn_na(double rn_ohm, const ElectricalParams& p);

// Ej/h = Ic / (4 pi e), reported in GHz.
double ej_over_h_ghz_from_ic(double ic_na);

// Ec/h = e^2 / (2 C h), reported in GHz.
double ec_from_capacitance_ghz(double capacitance_ff);
double capacitance_from_ec_ff(double ec_ghz);

// f01 = sqrt(8 Ec Ej) - Ec, all arguments/results in frequency units (GHz).
// Throws std::domain_error for nonpositive energies; when enforce_regime is
// set (default), also rejects Ej/Ec < 20 where the expression stops being a
// useful approximation.
double transmon_f01_ghz(double ej_over_h_ghz, double ec_over_h_ghz, bool enforce_regime = true);
bool in_transmon_regime(double ej_over_h_ghz, double ec_over_h_ghz);

// alpha = a_small / a_large; requires 0 < a_small <= a_large.
double squid_asymmetry(double area_small_um2, double area_large_um2);

// Full chain for one junction.
JunctionElectrical junction_electrical(double area_um2, const ElectricalParams& p);

// First-order frequency sensitivity k = d(ln f01)/d(ln Ej) evaluated at the
// operating point: k = sqrt(8 Ec Ej) / (sqrt(8 Ec Ej) - Ec) / 2 ... exposed
// as the full chain factor d(ln f01)/d(ln A) (= -0.5 * k2 with k2 below).
double f01_log_area_sensitivity(double area_um2, const ElectricalParams& p);

enum class PropagationMode { Analytic, MonteCarlo };

struct PropagationResult {
  double f01_cv_percent = 0.0;
  double f01_mean_ghz = 0.0;
  double f01_spread_percent = 0.0;  // (max-min)/mean over MC samples, 0 for analytic
};

// Pushes a relative area spread through the full chain. Analytic mode uses
// the first-order factor above; Monte Carlo samples areas log-normally
// (mean-preserving) and reports the sample CV. Both agree within a few
// percent for CV <= 5%.
PropagationResult propagate_variation(double area_cv_percent, double nominal_area_um2,
                                      const ElectricalParams& p, PropagationMode mode,
                                      std::int64_t mc_samples = 100000,
                                      std::uint64_t seed = 12345);

// RA calibration from a measured or simulated dataset: median of Rn * A
// over usable records. Keeps ingested datasets self-consistent with the
// resistance chain.
double calibrate_ra_ohm_um2(const JunctionDataset& ds);

}  // namespace jfab::elec
