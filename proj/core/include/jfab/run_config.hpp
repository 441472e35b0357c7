#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "jfab/wafer.hpp"

namespace jfab::cfg {

// Parsed simulation run: layout + model configuration + seed. Loading is
// strict: unknown keys anywhere in the document are rejected with the key
// path and (best effort) the source line.
struct RunConfig {
  std::uint64_t seed = 0;
  wafer::WaferLayout layout;
  wafer::SimulationConfig sim;

  std::string config_hash;  // FNV-1a of the canonical JSON echo
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text, const std::string& origin = "<string>");

// Canonical JSON echo of the effective configuration (defaults filled in);
// written next to every run's outputs.
std::string dump_run_config(const RunConfig& cfg);

// Bundled calibrations as RunConfig values.
RunConfig bundled_wafer_45deg();   // full wafer study, angled first film
RunConfig bundled_wafer_0deg();    // both films at 0 degrees
RunConfig bundled_overlay(double angle1_deg, double bottom_nm);  // regime comparison

}  // namespace jfab::cfg
