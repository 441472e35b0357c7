#pragma once

#include <string>

#include "jfab/stats.hpp"

namespace jfab::io {

// Heat-map emitters. Empty cells are written as "nan" in CSV, mid-gray in
// the PGM and hatched in the SVG; values are never interpolated.
void save_heatmap_csv(const std::string& path, const stats::Heatmap& hm);
void save_heatmap_pgm(const std::string& path, const stats::Heatmap& hm);
void save_heatmap_svg(const std::string& path, const stats::Heatmap& hm,
                      const std::string& title);

}  // namespace jfab::io
