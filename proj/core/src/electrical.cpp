#include "jfab/electrical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "jfab/constants.hpp"
#include "jfab/rng.hpp"

namespace jfab::elec {

namespace c = jfab::constants;

void ElectricalParams::validate() const {
  if (!(gap_delta_uev > 0.0)) throw std::invalid_argument("ElectricalParams: gap must be > 0");
  if (!(ra_product_ohm_um2 > 0.0))
    throw std::invalid_argument("ElectricalParams: RA product must be > 0");
  if (!(capacitance_ff > 0.0))
    throw std::invalid_argument("ElectricalParams: capacitance must be > 0");
}

double rn_from_area_ohm(double area_um2, const ElectricalParams& p) {
  p.validate();
  if (!(area_um2 > 0.0)) throw std::domain_error("rn_from_area: area must be > 0");
  return p.ra_product_ohm_um2 / area_um2;
}

double ic_from_rn_na(double rn_ohm, const ElectricalParams& p) {
  p.validate();
  if (!(rn_ohm > 0.0)) throw std::domain_error("ic_from_rn: Rn must be > 0");
  // Ic = pi * (Delta/e) / (2 Rn); Delta/e in volts.
  const double delta_v = p.gap_delta_uev * 1e-6;
  return c::kPi * delta_v / (2.0 * rn_ohm) * 1e9;
}

double ej_over_h_ghz_from_ic(double ic_na) {
  if (!(ic_na > 0.0)) throw std::domain_error("ej_from_ic: Ic must be > 0");
  // Ej = hbar Ic / (2e)  =>  Ej/h = Ic / (4 pi e)
  const double ic_a = ic_na * 1e-9;
  return ic_a / (4.0 * c::kPi * c::kElementaryChargeC) * 1e-9;
}

double ec_from_capacitance_ghz(double capacitance_ff) {
  if (!(capacitance_ff > 0.0)) throw std::domain_error("ec_from_capacitance: C must be > 0");
  const double c_f = capacitance_ff * 1e-15;
  const double ec_j = c::kElementaryChargeC * c::kElementaryChargeC / (2.0 * c_f);
  return ec_j / c::kPlanckJs * 1e-9;
}

double capacitance_from_ec_ff(double ec_ghz) {
  if (!(ec_ghz > 0.0)) throw std::domain_error("capacitance_from_ec: Ec must be > 0");
  const double ec_j = ec_ghz * 1e9 * c::kPlanckJs;
  return c::kElementaryChargeC * c::kElementaryChargeC / (2.0 * ec_j) * 1e15;
}

bool in_transmon_regime(double ej_over_h_ghz, double ec_over_h_ghz) {
  return ej_over_h_ghz > 0.0 && ec_over_h_ghz > 0.0 && ej_over_h_ghz / ec_over_h_ghz >= 20.0;
}

double transmon_f01_ghz(double ej_over_h_ghz, double ec_over_h_ghz, bool enforce_regime) {
  if (!(ej_over_h_ghz > 0.0) || !(ec_over_h_ghz > 0.0))
    throw std::domain_error("transmon_f01: energies must be > 0");
  if (enforce_regime && !in_transmon_regime(ej_over_h_ghz, ec_over_h_ghz))
    throw std::domain_error("transmon_f01: Ej/Ec < 20, outside the transmon regime");
  return std::sqrt(8.0 * ec_over_h_ghz * ej_over_h_ghz) - ec_over_h_ghz;
}

double squid_asymmetry(double area_small_um2, double area_large_um2) {
  if (!(area_small_um2 > 0.0) || !(area_large_um2 > 0.0))
    throw std::domain_error("squid_asymmetry: areas must be > 0");
  if (area_small_um2 > area_large_um2)
    throw std::invalid_argument("squid_asymmetry: expected area_small <= area_large");
  return area_small_um2 / area_large_um2;
}

JunctionElectrical junction_electrical(double area_um2, const ElectricalParams& p) {
  JunctionElectrical out;
  out.rn_ohm = rn_from_area_ohm(area_um2, p);
  out.ic_na = ic_from_rn_na(out.rn_ohm, p);
  out.ej_over_h_ghz = ej_over_h_ghz_from_ic(out.ic_na);
  return out;
}

double f01_log_area_sensitivity(double area_um2, const ElectricalParams& p) {
  const JunctionElectrical je = junction_electrical(area_um2, p);
  const double ec = ec_from_capacitance_ghz(p.capacitance_ff);
  const double plasma = std::sqrt(8.0 * ec * je.ej_over_h_ghz);
  // d(ln f01)/d(ln Ej) = 0.5 * plasma / (plasma - Ec); Ej scales as area.
  return 0.5 * plasma / (plasma - ec);
}

PropagationResult propagate_variation(double area_cv_percent, double nominal_area_um2,
                                      const ElectricalParams& p, PropagationMode mode,
                                      std::int64_t mc_samples, std::uint64_t seed) {
  if (area_cv_percent < 0.0) throw std::domain_error("propagate_variation: CV must be >= 0");
  if (!(nominal_area_um2 > 0.0))
    throw std::domain_error("propagate_variation: nominal area must be > 0");

  const double ec = ec_from_capacitance_ghz(p.capacitance_ff);
  PropagationResult out;

  if (mode == PropagationMode::Analytic || area_cv_percent == 0.0) {
    const double k = f01_log_area_sensitivity(nominal_area_um2, p);
    out.f01_cv_percent = k * area_cv_percent;
    const JunctionElectrical je = junction_electrical(nominal_area_um2, p);
    out.f01_mean_ghz = transmon_f01_ghz(je.ej_over_h_ghz, ec, false);
    return out;
  }

  if (mc_samples < 100) throw std::invalid_argument("propagate_variation: too few MC samples");
  const double cv = area_cv_percent / 100.0;
  // Mean-preserving log-normal area distribution.
  const double sig2 = std::log(1.0 + cv * cv);
  const double mu = std::log(nominal_area_um2) - 0.5 * sig2;
  const double sig = std::sqrt(sig2);

  StreamRng rng(seed, 0x9f01);
  double sum = 0.0, sum2 = 0.0;
  double fmin = 0.0, fmax = 0.0;
  for (std::int64_t i = 0; i < mc_samples; ++i) {
    const double area = std::exp(mu + sig * rng.normal());
    const JunctionElectrical je = junction_electrical(area, p);
    const double f = transmon_f01_ghz(je.ej_over_h_ghz, ec, false);
    sum += f;
    sum2 += f * f;
    if (i == 0) {
      fmin = fmax = f;
    } else {
      fmin = std::min(fmin, f);
      fmax = std::max(fmax, f);
    }
  }
  const double n = static_cast<double>(mc_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1.0));
  out.f01_mean_ghz = mean;
  out.f01_cv_percent = std::sqrt(var) / mean * 100.0;
  out.f01_spread_percent = (fmax - fmin) / mean * 100.0;
  return out;
}

double calibrate_ra_ohm_um2(const JunctionDataset& ds) {
  std::vector<double> products;
  for (const auto& r : ds.records)
    if (r.regime != geom::OverlapRegime::None && r.area_um2 > 0.0 && r.r_ohm > 0.0)
      products.push_back(r.r_ohm * r.area_um2);
  if (products.size() < 2)
    throw std::invalid_argument("calibrate_ra: need at least 2 usable records");
  std::sort(products.begin(), products.end());
  const std::size_t n = products.size();
  return n % 2 ? products[n / 2] : 0.5 * (products[n / 2 - 1] + products[n / 2]);
}

}  // namespace jfab::elec
