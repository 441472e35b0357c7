#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace jfab::repro {

struct CheckRow {
  std::string name;
  std::string band;   // human-readable acceptance band
  double value = 0.0;
  bool pass = false;
};

struct ReproResult {
  std::string id;
  std::vector<CheckRow> rows;

  bool all_pass() const;
  std::string to_text() const;  // one PASS/FAIL line per row
};

// Bundled reference experiments. Each runs the calibrated pipeline and
// compares against its acceptance bands.
ReproResult repro_fig2b(std::uint64_t seed);        // write-field vs LW 3-sigma
ReproResult repro_fig2c(std::uint64_t seed);        // scan-direction quantization
ReproResult repro_fig3a(std::uint64_t seed);        // edge roughness vs angle
ReproResult repro_fig3d(std::uint64_t seed);        // full vs partial overlay spread
ReproResult repro_fig4(std::uint64_t seed, const std::string& artifact_dir = "");
ReproResult repro_suppl_table1(std::uint64_t seed); // mean linewidth table

std::vector<std::string> repro_ids();

// CLI entry: runs one experiment, prints and writes the comparison table,
// returns 0 if every row passes. Unknown id lists the valid ids.
int run_repro(const std::string& id, const std::string& out_dir, std::uint64_t seed);

}  // namespace jfab::repro
