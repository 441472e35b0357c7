#pragma once

#include <string>
#include <vector>

#include "jfab/dataset.hpp"

namespace jfab::io {

// Dataset CSV schema v1.0:
//   # jfab-dataset v1.0 units=mm,nm,um2,ohm
//   chip_id,x_mm,y_mm,group,nom_w_nm,nom_l_nm,lw_top_nm,lw_bot_nm,regime,area_um2,r_ohm
// Readers reject files with a higher schema major version and, in strict
// mode, abort on the first malformed row.
inline constexpr const char* kDatasetHeader =
    "chip_id,x_mm,y_mm,group,nom_w_nm,nom_l_nm,lw_top_nm,lw_bot_nm,regime,area_um2,r_ohm";

void save_dataset_csv(const std::string& path, const JunctionDataset& ds);

struct CsvReadReport {
  std::vector<std::string> row_errors;  // "<line>: message" for skipped rows
  int rows_read = 0;
};

JunctionDataset load_dataset_csv(const std::string& path, bool strict,
                                 CsvReadReport* report = nullptr);

// Output metadata: config hash, seed and tool version; identical metadata
// implies byte-identical primary outputs.
void save_metadata_json(const std::string& path, const std::string& command,
                        std::uint64_t seed, const std::string& config_hash);

// FNV-1a 64-bit hex digest; used as the config hash.
std::string fnv1a_hex(const std::string& text);

}  // namespace jfab::io
