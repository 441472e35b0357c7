#include "jfab/dose.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "jfab/constants.hpp"
#include "jfab/parallel.hpp"

namespace jfab::dose {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Half error-function difference: integral of a 1-D normalized Gaussian of
// range r over [lo, hi], evaluated at x. Always in [0, 1].
inline double edge_factor(double lo, double hi, double x, double range) {
  return 0.5 * (std::erf((hi - x) / range) - std::erf((lo - x) / range));
}

inline double rect_term(const LayoutRect& rc, double x, double y, double range) {
  return edge_factor(rc.x0_um, rc.x1_um, x, range) * edge_factor(rc.y0_um, rc.y1_um, y, range);
}

bool intersects(const LayoutRect& rc, const Region& rg) {
  return rc.x0_um < rg.x1_um && rc.x1_um > rg.x0_um && rc.y0_um < rg.y1_um && rc.y1_um > rg.y0_um;
}

// Gauss-Legendre nodes/weights on [-1, 1], computed once per order.
struct GaussRule {
  std::vector<double> x, w;
};

GaussRule make_gauss(int n) {
  GaussRule g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double xi = std::cos(constants::kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = xi;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
      const double dx = p1 / dp;
      xi -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    g.x[i] = xi;
    g.w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  return g;
}

const GaussRule& gauss32() {
  static const GaussRule g = make_gauss(32);
  return g;
}

}  // namespace

void PsfParams::validate() const {
  require(alpha_fwd_um > 0.0, "PsfParams: alpha must be > 0");
  require(beta_back_um > alpha_fwd_um, "PsfParams: beta must exceed alpha");
  require(eta >= 0.0, "PsfParams: eta must be >= 0");
}

void LayoutRect::validate() const {
  require(x1_um > x0_um && y1_um > y0_um, "LayoutRect: requires x1 > x0 and y1 > y0");
  require(relative_dose > 0.0, "LayoutRect: relative dose must be > 0");
}

void ResistPreset::validate() const {
  psf.validate();
  require(base_dose_uc_cm2 > 0.0, "ResistPreset: base dose must be > 0");
  require(threshold_fraction > 0.0 && threshold_fraction < 1.0 + psf.eta,
          "ResistPreset: threshold outside (0, 1+eta)");
}

DoseTerms dose_terms_at_point(std::span<const LayoutRect> layout, const PsfParams& psf,
                              double x_um, double y_um) {
  psf.validate();
  DoseTerms t;
  const double wf = 1.0 / (1.0 + psf.eta);
  const double wb = psf.eta / (1.0 + psf.eta);
  for (const auto& rc : layout) {
    rc.validate();
    t.forward += rc.relative_dose * wf * rect_term(rc, x_um, y_um, psf.alpha_fwd_um);
    t.backscatter += rc.relative_dose * wb * rect_term(rc, x_um, y_um, psf.beta_back_um);
  }
  return t;
}

double dose_at_point(std::span<const LayoutRect> layout, const PsfParams& psf, double x_um,
                     double y_um) {
  return dose_terms_at_point(layout, psf, x_um, y_um).total();
}

double region_mean_dose(std::span<const LayoutRect> layout, const PsfParams& psf,
                        const Region& region) {
  require(!region.empty(), "region_mean_dose: empty region");
  const GaussRule& g = gauss32();
  const double cx = 0.5 * (region.x0_um + region.x1_um);
  const double cy = 0.5 * (region.y0_um + region.y1_um);
  const double hx = 0.5 * (region.x1_um - region.x0_um);
  const double hy = 0.5 * (region.y1_um - region.y0_um);
  double acc = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i)
    for (std::size_t j = 0; j < g.x.size(); ++j)
      acc += 0.25 * g.w[i] * g.w[j] *
             dose_at_point(layout, psf, cx + hx * g.x[i], cy + hy * g.x[j]);
  return acc;
}

double backscatter_increase_pct(std::span<const LayoutRect> layout, const PsfParams& psf,
                                const Region& feature_region) {
  psf.validate();
  require(!feature_region.empty(), "backscatter_increase: empty feature region");

  std::vector<LayoutRect> own, other;
  for (const auto& rc : layout) {
    rc.validate();
    (intersects(rc, feature_region) ? own : other).push_back(rc);
  }
  require(!own.empty(), "backscatter_increase: no shape intersects the feature region");

  // Backscatter-only dose from the other shapes.
  const GaussRule& g = gauss32();
  const double cx = 0.5 * (feature_region.x0_um + feature_region.x1_um);
  const double cy = 0.5 * (feature_region.y0_um + feature_region.y1_um);
  const double hx = 0.5 * (feature_region.x1_um - feature_region.x0_um);
  const double hy = 0.5 * (feature_region.y1_um - feature_region.y0_um);
  const double wb = psf.eta / (1.0 + psf.eta);
  double back_other = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) {
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      const double px = cx + hx * g.x[i];
      const double py = cy + hy * g.x[j];
      double b = 0.0;
      for (const auto& rc : other)
        b += rc.relative_dose * wb * rect_term(rc, px, py, psf.beta_back_um);
      back_other += 0.25 * g.w[i] * g.w[j] * b;
    }
  }

  const double own_full = region_mean_dose(own, psf, feature_region);
  require(own_full > 0.0, "backscatter_increase: feature dose is zero");
  return back_other / own_full * 100.0;
}

namespace {

// Dose along the cut used by linewidth_bias.
struct Cut {
  std::span<const LayoutRect> layout;
  const PsfParams* psf;
  bool along_x;  // true: vary x at fixed y
  double fixed;
  double operator()(double t) const {
    return along_x ? dose_at_point(layout, *psf, t, fixed) : dose_at_point(layout, *psf, fixed, t);
  }
};

double bisect_edge(const Cut& cut, double threshold, double t_in, double t_out) {
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (t_in + t_out);
    if (cut(mid) >= threshold)
      t_in = mid;
    else
      t_out = mid;
    if (std::abs(t_out - t_in) < 1e-5) break;  // 0.01 nm
  }
  return 0.5 * (t_in + t_out);
}

}  // namespace

double linewidth_bias_nm(std::span<const LayoutRect> layout, const ResistPreset& preset,
                         std::size_t feature_index) {
  preset.validate();
  require(feature_index < layout.size(), "linewidth_bias: feature index out of range");
  const LayoutRect& f = layout[feature_index];
  f.validate();

  const bool cut_along_x = f.width_um() <= f.height_um();
  const double nominal_um = cut_along_x ? f.width_um() : f.height_um();
  Cut cut{layout, &preset.psf, cut_along_x,
          cut_along_x ? 0.5 * (f.y0_um + f.y1_um) : 0.5 * (f.x0_um + f.x1_um)};
  const double center = cut_along_x ? 0.5 * (f.x0_um + f.x1_um) : 0.5 * (f.y0_um + f.y1_um);

  const double threshold = preset.threshold_fraction;
  if (cut(center) < threshold)
    throw std::runtime_error("linewidth_bias: feature not developed (dose below threshold)");

  // Search limit: past every shape plus three backscatter ranges.
  double span = 0.0;
  for (const auto& rc : layout)
    span = std::max({span, std::abs(rc.x0_um), std::abs(rc.x1_um), std::abs(rc.y0_um),
                     std::abs(rc.y1_um)});
  const double limit = span + 3.0 * preset.psf.beta_back_um;
  const double step = preset.psf.alpha_fwd_um / 4.0;

  double edge[2];
  for (int dir = 0; dir < 2; ++dir) {
    const double sgn = dir == 0 ? 1.0 : -1.0;
    double t_in = center;
    bool found = false;
    for (double t = center + sgn * step; std::abs(t - center) <= limit; t += sgn * step) {
      if (cut(t) >= threshold) {
        t_in = t;
      } else {
        edge[dir] = bisect_edge(cut, threshold, t_in, t);
        found = true;
        break;
      }
    }
    if (!found)
      throw std::runtime_error(
          "linewidth_bias: developed region merges with neighboring shapes");
  }

  const double developed_um = edge[0] - edge[1];
  return (developed_um - nominal_um) * 1e3;
}

std::vector<LayoutRect> reference_layout(bool with_pads) {
  // Versioned geometry; see docs/reference_layout.md. Feature first.
  std::vector<LayoutRect> layout;
  layout.push_back({-0.075, -0.5, 0.075, 0.5, 1.0});  // 150 nm x 1 um junction line
  if (with_pads) {
    layout.push_back({1.075, -2.5, 6.075, 2.5, 1.0});    // east 5x5 pad, 1 um gap
    layout.push_back({-6.075, -2.5, -1.075, 2.5, 1.0});  // west
    layout.push_back({-2.5, 1.5, 2.5, 6.5, 1.0});        // north
    layout.push_back({-2.5, -6.5, 2.5, -1.5, 1.0});      // south
  }
  return layout;
}

std::size_t reference_feature_index() { return 0; }

Region reference_feature_region() { return {-0.075, -0.25, 0.075, 0.25}; }

ResistPreset calibrate_preset(const std::string& name, double beta_back_um,
                              double target_increase_pct, double target_bias_nm,
                              double base_dose_uc_cm2) {
  const auto layout = reference_layout(true);
  const Region region = reference_feature_region();

  ResistPreset preset;
  preset.name = name;
  preset.base_dose_uc_cm2 = base_dose_uc_cm2;
  preset.psf.alpha_fwd_um = 0.05;
  preset.psf.beta_back_um = beta_back_um;

  // increase(eta) is monotone increasing; bisect.
  double lo = 0.0, hi = 20.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    preset.psf.eta = std::max(mid, 1e-12);
    if (backscatter_increase_pct(layout, preset.psf, region) < target_increase_pct)
      lo = mid;
    else
      hi = mid;
  }
  preset.psf.eta = 0.5 * (lo + hi);

  // bias(threshold) is monotone decreasing; bisect.
  double tlo = 0.02, thi = 0.98;
  for (int i = 0; i < 200; ++i) {
    preset.threshold_fraction = 0.5 * (tlo + thi);
    if (linewidth_bias_nm(layout, preset, reference_feature_index()) > target_bias_nm)
      tlo = preset.threshold_fraction;
    else
      thi = preset.threshold_fraction;
  }
  preset.threshold_fraction = 0.5 * (tlo + thi);
  return preset;
}

ResistPreset preset_mma_pmma_a4() {
  // Pinned by calibrate_preset("mma-pmma-a4", 7.9, 30.0, 50.0, 180.0);
  // beta is the 50 keV silicon Monte Carlo fit. The test suite re-derives
  // these values against the live calibration.
  ResistPreset p;
  p.name = "mma-pmma-a4";
  p.psf.alpha_fwd_um = 0.05;
  p.psf.beta_back_um = 7.9;
  p.psf.eta = 0.63321753;
  p.base_dose_uc_cm2 = 180.0;
  p.threshold_fraction = 0.29634405;
  return p;
}

ResistPreset preset_mma_csar62() {
  // Pinned by calibrate_preset("mma-csar62", 7.9, 10.0, 50.0/3, 55.0).
  ResistPreset p;
  p.name = "mma-csar62";
  p.psf.alpha_fwd_um = 0.05;
  p.psf.beta_back_um = 7.9;
  p.psf.eta = 0.21098873;
  p.base_dose_uc_cm2 = 55.0;
  p.threshold_fraction = 0.40317136;
  return p;
}

ResistPreset preset_by_name(const std::string& name) {
  if (name == "mma-pmma-a4") return preset_mma_pmma_a4();
  if (name == "mma-csar62") return preset_mma_csar62();
  throw std::invalid_argument("unknown resist preset: " + name +
                              " (expected mma-pmma-a4 or mma-csar62)");
}

std::vector<std::string> preset_names() { return {"mma-pmma-a4", "mma-csar62"}; }

std::vector<double> dose_map(std::span<const LayoutRect> layout, const PsfParams& psf,
                             const Region& window, int nx, int ny) {
  require(nx >= 1 && ny >= 1, "dose_map: grid must be at least 1x1");
  require(!window.empty(), "dose_map: empty window");
  std::vector<double> grid(static_cast<std::size_t>(nx) * ny, 0.0);
  const double dx = (window.x1_um - window.x0_um) / nx;
  const double dy = (window.y1_um - window.y0_um) / ny;
  parallel_for_chunks(ny, [&](std::int64_t iy) {
    const double y = window.y0_um + (iy + 0.5) * dy;
    for (int ix = 0; ix < nx; ++ix) {
      const double x = window.x0_um + (ix + 0.5) * dx;
      grid[static_cast<std::size_t>(iy) * nx + ix] = dose_at_point(layout, psf, x, y);
    }
  });
  return grid;
}

std::vector<LayoutRect> load_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open layout file: " + path);

  std::vector<LayoutRect> layout;
  const bool is_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
  if (is_json) {
    nlohmann::json j;
    in >> j;
    const nlohmann::json& arr = j.is_array() ? j : j.at("rects");
    for (const auto& e : arr) {
      LayoutRect rc;
      rc.x0_um = e.at("x0").get<double>();
      rc.y0_um = e.at("y0").get<double>();
      rc.x1_um = e.at("x1").get<double>();
      rc.y1_um = e.at("y1").get<double>();
      rc.relative_dose = e.value("dose", 1.0);
      rc.validate();
      layout.push_back(rc);
    }
  } else {
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      line_no++;
      if (line.empty() || line[0] == '#') continue;
      if (line_no == 1 && line.find("x0") != std::string::npos) continue;  // header
      LayoutRect rc;
      if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &rc.x0_um, &rc.y0_um, &rc.x1_um,
                      &rc.y1_um, &rc.relative_dose) != 5)
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed layout row");
      rc.validate();
      layout.push_back(rc);
    }
  }
  if (layout.empty()) throw std::runtime_error("layout file has no rectangles: " + path);
  return layout;
}

void save_layout_json(const std::string& path, std::span<const LayoutRect> layout) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& rc : layout)
    arr.push_back({{"x0", rc.x0_um},
                   {"y0", rc.y0_um},
                   {"x1", rc.x1_um},
                   {"y1", rc.y1_um},
                   {"dose", rc.relative_dose}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write layout file: " + path);
  out << nlohmann::json{{"rects", arr}}.dump(2) << "\n";
}

}  // namespace jfab::dose
