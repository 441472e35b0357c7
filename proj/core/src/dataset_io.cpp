#include "jfab/dataset_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "jfab/version.hpp"

namespace jfab::io {

void save_dataset_csv(const std::string& path, const JunctionDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  char buf[512];
  std::snprintf(buf, sizeof(buf), "# jfab-dataset v%d.%d units=mm,nm,um2,ohm seed=%llu hash=%s\n",
                kDatasetSchemaMajor, kDatasetSchemaMinor,
                static_cast<unsigned long long>(ds.meta.seed), ds.meta.config_hash.c_str());
  out << buf << kDatasetHeader << "\n";
  for (const auto& r : ds.records) {
    std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f,%s,%.2f,%.2f,%.6f,%.6f,%s,%.10f,%.6f\n",
                  r.chip_id.c_str(), r.x_mm, r.y_mm, r.group.c_str(), r.nom_w_nm, r.nom_l_nm,
                  r.lw_top_nm, r.lw_bot_nm, geom::to_string(r.regime), r.area_um2, r.r_ohm);
    out << buf;
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& s, const char* field) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::runtime_error("trailing characters");
    return v;
  } catch (...) {
    throw std::runtime_error("bad number '" + s + "' in column " + field);
  }
}

}  // namespace

JunctionDataset load_dataset_csv(const std::string& path, bool strict, CsvReadReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);

  JunctionDataset ds;
  ds.meta.source = "measured";
  std::string line;
  int line_no = 0;
  bool header_seen = false;

  auto fail_row = [&](const std::string& msg) {
    const std::string full = std::to_string(line_no) + ": " + msg;
    if (strict) throw std::runtime_error(path + ":" + full);
    if (report) report->row_errors.push_back(full);
  };

  while (std::getline(in, line)) {
    line_no++;
    if (line.empty() || line == "\r") continue;
    if (line[0] == '#') {
      int major = 0, minor = 0;
      if (std::sscanf(line.c_str(), "# jfab-dataset v%d.%d", &major, &minor) == 2) {
        if (major > kDatasetSchemaMajor)
          throw std::runtime_error(path + ": dataset schema v" + std::to_string(major) +
                                   " is newer than this reader (v" +
                                   std::to_string(kDatasetSchemaMajor) + ")");
      }
      const char* seed_tag = std::strstr(line.c_str(), "seed=");
      if (seed_tag) ds.meta.seed = std::strtoull(seed_tag + 5, nullptr, 10);
      continue;
    }
    if (!header_seen) {
      if (line.rfind("chip_id,", 0) != 0)
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected dataset header row");
      header_seen = true;
      continue;
    }

    const auto cols = split_csv(line);
    if (cols.size() < 11) {
      fail_row("expected 11 columns, got " + std::to_string(cols.size()));
      continue;
    }
    try {
      JunctionRecord r;
      r.chip_id = cols[0];
      r.x_mm = parse_num(cols[1], "x_mm");
      r.y_mm = parse_num(cols[2], "y_mm");
      r.group = cols[3];
      r.nom_w_nm = parse_num(cols[4], "nom_w_nm");
      r.nom_l_nm = parse_num(cols[5], "nom_l_nm");
      r.lw_top_nm = parse_num(cols[6], "lw_top_nm");
      r.lw_bot_nm = parse_num(cols[7], "lw_bot_nm");
      r.regime = geom::regime_from_string(cols[8]);
      r.area_um2 = parse_num(cols[9], "area_um2");
      r.r_ohm = parse_num(cols[10], "r_ohm");
      ds.records.push_back(std::move(r));
      if (report) report->rows_read++;
    } catch (const std::exception& e) {
      fail_row(e.what());
    }
  }
  if (!header_seen) throw std::runtime_error(path + ": no header row found");
  return ds;
}

void save_metadata_json(const std::string& path, const std::string& command, std::uint64_t seed,
                        const std::string& config_hash) {
  nlohmann::json j{{"tool", "jfab"},
                   {"version", kVersion},
                   {"command", command},
                   {"seed", seed},
                   {"config_hash", config_hash},
                   {"schema", std::to_string(kDatasetSchemaMajor) + "." +
                                  std::to_string(kDatasetSchemaMinor)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metadata: " + path);
  out << j.dump(2) << "\n";
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace jfab::io
