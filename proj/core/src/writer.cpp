#include "jfab/writer.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace jfab::writer {

namespace {

const double kStudiedFields[] = {50.0, 100.0, 200.0, 500.0};
const double kStudiedSteps[] = {2.0, 3.0, 5.0};

bool contains(const double* arr, std::size_t n, double v) {
  for (std::size_t i = 0; i < n; ++i)
    if (arr[i] == v) return true;
  return false;
}

// Flat below the first knot and above the last; log-linear in between.
double lookup_log_interp(const std::map<double, double>& table, double key) {
  if (table.empty()) throw std::invalid_argument("writer model: empty lookup table");
  auto hi = table.lower_bound(key);
  if (hi == table.begin()) return hi->second;
  if (hi == table.end()) return std::prev(hi)->second;
  if (hi->first == key) return hi->second;
  auto lo = std::prev(hi);
  const double t = (std::log(key) - std::log(lo->first)) / (std::log(hi->first) - std::log(lo->first));
  return lo->second + t * (hi->second - lo->second);
}

}  // namespace

const char* to_string(ScanDirection d) { return d == ScanDirection::Along ? "along" : "across"; }

ScanDirection scan_direction_from_string(const std::string& s) {
  if (s == "along" || s == "Along") return ScanDirection::Along;
  if (s == "across" || s == "Across") return ScanDirection::Across;
  throw std::invalid_argument("unknown scan direction: " + s);
}

void WriterConfig::validate() const {
  if (!(field_size_um > 0.0)) throw std::invalid_argument("WriterConfig: field size must be > 0");
  if (!(step_size_nm > 0.0)) throw std::invalid_argument("WriterConfig: step size must be > 0");
}

bool WriterConfig::extrapolated() const {
  return !contains(kStudiedFields, 4, field_size_um) || !contains(kStudiedSteps, 3, step_size_nm);
}

void LwNoiseModel::validate() const {
  double prev = 0.0;
  for (const auto& [fs, s3] : sigma3_by_field_size_nm) {
    if (s3 < 0.0) throw std::invalid_argument("LwNoiseModel: sigma3 must be >= 0");
    if (s3 < prev) throw std::invalid_argument("LwNoiseModel: sigma3 must not decrease with field size");
    prev = s3;
  }
  for (const auto& [fs, p] : placement_max_by_field_size_nm)
    if (p < 0.0) throw std::invalid_argument("LwNoiseModel: placement must be >= 0");
  if (quantization_along_nm < 0.0 || quantization_across_nm < 0.0)
    throw std::invalid_argument("LwNoiseModel: quantization must be >= 0");
}

double lw_3sigma_nm(const LwNoiseModel& model, double field_size_um) {
  if (!(field_size_um > 0.0)) throw std::invalid_argument("lw_3sigma: field size must be > 0");
  return lookup_log_interp(model.sigma3_by_field_size_nm, field_size_um);
}

double placement_max_nm(const LwNoiseModel& model, double field_size_um) {
  if (!(field_size_um > 0.0)) throw std::invalid_argument("placement_max: field size must be > 0");
  return lookup_log_interp(model.placement_max_by_field_size_nm, field_size_um);
}

double bias_nm(const LwNoiseModel& model, ScanDirection dir) {
  return dir == ScanDirection::Along ? model.bias_along_nm : model.bias_across_nm;
}

double quantization_nm(const LwNoiseModel& model, const WriterConfig& cfg) {
  const double q = cfg.scan_direction == ScanDirection::Along ? model.quantization_along_nm
                                                              : model.quantization_across_nm;
  return q > 0.0 ? q : cfg.step_size_nm;
}

double quantize_down_nm(double nominal_nm, double granularity_nm) {
  if (granularity_nm <= 0.0) return nominal_nm;
  return std::floor(nominal_nm / granularity_nm + 1e-9) * granularity_nm;
}

double realized_mean_nm(double nominal_nm, const WriterConfig& cfg, const LwNoiseModel& model) {
  if (!(nominal_nm > 0.0)) throw std::invalid_argument("realized linewidth: nominal must be > 0");
  cfg.validate();
  return quantize_down_nm(nominal_nm, quantization_nm(model, cfg)) +
         bias_nm(model, cfg.scan_direction);
}

double realized_linewidth_nm(double nominal_nm, const WriterConfig& cfg,
                             const LwNoiseModel& model, StreamRng& rng) {
  const double mean = realized_mean_nm(nominal_nm, cfg, model);
  const double sigma = lw_3sigma_nm(model, cfg.field_size_um) / 3.0;
  return mean + sigma * rng.normal();
}

double calc_min_step_nm(double clock_mhz, double dose_uc_cm2, double current_pa) {
  if (!(clock_mhz > 0.0) || !(dose_uc_cm2 > 0.0) || !(current_pa > 0.0))
    throw std::invalid_argument("calc_min_step: all arguments must be > 0");
  // step^2 = I / (D * f): pA = 1e-12 A, uC/cm^2 = 1e-20 C/nm^2, MHz = 1e6/s.
  const double step2_nm2 = (current_pa * 1e-12) / (dose_uc_cm2 * 1e-20 * clock_mhz * 1e6);
  return std::round(std::sqrt(step2_nm2) * 10.0) / 10.0;
}

std::string LwNoiseModel::to_json() const {
  nlohmann::json j;
  for (const auto& [k, v] : sigma3_by_field_size_nm) j["sigma3_by_field_size_nm"][std::to_string(k)] = v;
  for (const auto& [k, v] : placement_max_by_field_size_nm)
    j["placement_max_by_field_size_nm"][std::to_string(k)] = v;
  j["bias_along_nm"] = bias_along_nm;
  j["bias_across_nm"] = bias_across_nm;
  j["quantization_along_nm"] = quantization_along_nm;
  j["quantization_across_nm"] = quantization_across_nm;
  return j.dump(2);
}

LwNoiseModel LwNoiseModel::from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  LwNoiseModel m;
  if (j.contains("sigma3_by_field_size_nm")) {
    m.sigma3_by_field_size_nm.clear();
    for (const auto& [k, v] : j.at("sigma3_by_field_size_nm").items())
      m.sigma3_by_field_size_nm[std::stod(k)] = v.get<double>();
  }
  if (j.contains("placement_max_by_field_size_nm")) {
    m.placement_max_by_field_size_nm.clear();
    for (const auto& [k, v] : j.at("placement_max_by_field_size_nm").items())
      m.placement_max_by_field_size_nm[std::stod(k)] = v.get<double>();
  }
  m.bias_along_nm = j.value("bias_along_nm", m.bias_along_nm);
  m.bias_across_nm = j.value("bias_across_nm", m.bias_across_nm);
  m.quantization_along_nm = j.value("quantization_along_nm", m.quantization_along_nm);
  m.quantization_across_nm = j.value("quantization_across_nm", m.quantization_across_nm);
  m.validate();
  return m;
}

}  // namespace jfab::writer
