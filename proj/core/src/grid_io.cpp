#include "jfab/grid_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace jfab::io {

namespace {

std::pair<double, double> value_range(const stats::Heatmap& hm) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (int iy = 0; iy < hm.ny; ++iy) {
    for (int ix = 0; ix < hm.nx; ++ix) {
      if (hm.cell_empty(ix, iy)) continue;
      const double v = hm.cell_mean[static_cast<std::size_t>(iy) * hm.nx + ix];
      if (first) {
        lo = hi = v;
        first = false;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  if (first) throw std::runtime_error("heatmap output: all cells are empty");
  if (hi == lo) hi = lo + 1.0;
  return {lo, hi};
}

}  // namespace

void save_heatmap_csv(const std::string& path, const stats::Heatmap& hm) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write heatmap csv: " + path);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "# grid %dx%d origin_mm=%.3f,%.3f cell_mm=%.4f,%.4f\n", hm.nx,
                hm.ny, hm.x0, hm.y0, hm.dx, hm.dy);
  out << buf;
  std::snprintf(buf, sizeof(buf), "# plane_fit grad_x=%.6g grad_y=%.6g offset=%.6g\n", hm.grad_x,
                hm.grad_y, hm.plane_offset);
  out << buf;
  for (int iy = 0; iy < hm.ny; ++iy) {
    for (int ix = 0; ix < hm.nx; ++ix) {
      if (ix) out << ",";
      if (hm.cell_empty(ix, iy)) {
        out << "nan";
      } else {
        std::snprintf(buf, sizeof(buf), "%.6g",
                      hm.cell_mean[static_cast<std::size_t>(iy) * hm.nx + ix]);
        out << buf;
      }
    }
    out << "\n";
  }
}

void save_heatmap_pgm(const std::string& path, const stats::Heatmap& hm) {
  const auto [lo, hi] = value_range(hm);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write heatmap pgm: " + path);
  out << "P2\n" << hm.nx << " " << hm.ny << "\n255\n";
  for (int iy = hm.ny - 1; iy >= 0; --iy) {  // image rows top-down, y up
    for (int ix = 0; ix < hm.nx; ++ix) {
      int g = 128;
      if (!hm.cell_empty(ix, iy)) {
        const double v = hm.cell_mean[static_cast<std::size_t>(iy) * hm.nx + ix];
        g = static_cast<int>(std::lround((v - lo) / (hi - lo) * 255.0));
        g = std::clamp(g, 0, 255);
      }
      out << g << (ix + 1 == hm.nx ? "" : " ");
    }
    out << "\n";
  }
}

void save_heatmap_svg(const std::string& path, const stats::Heatmap& hm,
                      const std::string& title) {
  const auto [lo, hi] = value_range(hm);
  const int cell_px = 24;
  const int w = hm.nx * cell_px, h = hm.ny * cell_px;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write heatmap svg: " + path);
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << (h + 48)
      << "\">\n";
  out << "<text x=\"4\" y=\"16\" font-family=\"monospace\" font-size=\"13\">" << title
      << "</text>\n";
  for (int iy = 0; iy < hm.ny; ++iy) {
    for (int ix = 0; ix < hm.nx; ++ix) {
      const int px = ix * cell_px;
      const int py = 28 + (hm.ny - 1 - iy) * cell_px;
      if (hm.cell_empty(ix, iy)) {
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
                      "stroke=\"#999\" stroke-dasharray=\"2,2\"/>\n",
                      px, py, cell_px, cell_px);
      } else {
        const double v = hm.cell_mean[static_cast<std::size_t>(iy) * hm.nx + ix];
        const int g = std::clamp(static_cast<int>(std::lround((v - lo) / (hi - lo) * 255.0)), 0, 255);
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"rgb(%d,%d,%d)\"/>\n",
                      px, py, cell_px, cell_px, g, g, g);
      }
      out << buf;
    }
  }
  std::snprintf(buf, sizeof(buf),
                "<text x=\"4\" y=\"%d\" font-family=\"monospace\" font-size=\"11\">range %.6g .. "
                "%.6g, grad (%.3g, %.3g)/mm</text>\n",
                h + 44, lo, hi, hm.grad_x, hm.grad_y);
  out << buf << "</svg>\n";
}

}  // namespace jfab::io
