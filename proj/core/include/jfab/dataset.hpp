#pragma once

#include <string>
#include <vector>

#include "jfab/geometry.hpp"

namespace jfab {

// One junction site: the unit of every statistic in the toolkit.
// lw_top/lw_bot are the realized electrode linewidths; area/resistance are
// zero for regime None (open site).
struct JunctionRecord {
  std::string chip_id;
  double x_mm = 0.0;
  double y_mm = 0.0;
  std::string group;        // area-group label, e.g. "0.025"
  double nom_w_nm = 0.0;    // nominal tilt-axis window (bottom electrode)
  double nom_l_nm = 0.0;    // nominal transverse linewidth (top electrode)
  double lw_top_nm = 0.0;
  double lw_bot_nm = 0.0;
  geom::OverlapRegime regime = geom::OverlapRegime::None;
  double area_um2 = 0.0;
  double r_ohm = 0.0;
};

struct DatasetMeta {
  std::string source = "simulated";  // "simulated" or "measured"
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct JunctionDataset {
  std::vector<JunctionRecord> records;
  DatasetMeta meta;
};

}  // namespace jfab
