#include "jfab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace jfab::stats {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean: empty input");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double sample_stddev(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw std::invalid_argument("sample_stddev: need at least 2 values");
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

double cv_percent(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("cv_percent: need at least 2 values");
  const double m = mean(values);
  if (m == 0.0) throw std::invalid_argument("cv_percent: mean is zero");
  return sample_stddev(values) / std::abs(m) * 100.0;
}

double maxmin_spread_percent(std::span<const double> values) {
  if (values.size() < 2) throw std::invalid_argument("spread: need at least 2 values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double m = mean(values);
  if (m == 0.0) throw std::invalid_argument("spread: mean is zero");
  return (*hi - *lo) / std::abs(m) * 100.0;
}

FilterResult three_sigma_filter(std::span<const double> values) {
  if (values.size() < 8) throw std::invalid_argument("three_sigma_filter: need at least 8 values");
  FilterResult out;
  out.kept.assign(values.begin(), values.end());
  for (int pass = 0; pass < 3; ++pass) {
    if (out.kept.size() < 2) break;
    const double m = mean(out.kept);
    const double s = sample_stddev(out.kept);
    std::vector<double> next;
    next.reserve(out.kept.size());
    bool changed = false;
    for (double v : out.kept) {
      if (std::abs(v - m) > 3.0 * s) {
        out.removed.push_back(v);
        changed = true;
      } else {
        next.push_back(v);
      }
    }
    out.kept.swap(next);
    if (!changed) break;
  }
  return out;
}

namespace {

struct GroupBucket {
  std::map<std::string, std::vector<double>> r_by_chip;
  int n_total = 0;
  int n_open = 0;
};

}  // namespace

VariationReport variation_report(const JunctionDataset& ds, const ReportOptions& opts) {
  if (ds.records.empty()) throw std::invalid_argument("variation_report: empty dataset");

  std::map<std::string, GroupBucket> buckets;
  int usable = 0;
  for (const auto& rec : ds.records) {
    auto& b = buckets[rec.group];
    b.n_total++;
    if (rec.regime == geom::OverlapRegime::None || !(rec.r_ohm > 0.0)) {
      b.n_open++;
      continue;
    }
    b.r_by_chip[rec.chip_id].push_back(rec.r_ohm);
    usable++;
  }

  VariationReport report;
  report.yield_fraction = static_cast<double>(usable) / static_cast<double>(ds.records.size());

  for (auto& [group, bucket] : buckets) {
    GroupVariation gv;
    gv.group = group;
    gv.n_total = bucket.n_total;
    gv.n_open = bucket.n_open;

    std::vector<double> all;
    for (const auto& [chip, rs] : bucket.r_by_chip)
      all.insert(all.end(), rs.begin(), rs.end());

    if (all.size() < 2) {
      report.warnings.push_back("group " + group + " skipped: fewer than 2 usable records");
      continue;
    }

    std::set<double> removed_set;
    std::vector<double> wafer_values = all;
    if (opts.apply_outlier_filter && all.size() >= 8) {
      FilterResult fr = three_sigma_filter(all);
      gv.n_outliers = static_cast<int>(fr.removed.size());
      wafer_values = std::move(fr.kept);
      removed_set.insert(fr.removed.begin(), fr.removed.end());
    }
    gv.n_used = static_cast<int>(wafer_values.size());
    gv.mean_r_ohm = mean(wafer_values);
    gv.wafer_cv_pct = cv_percent(wafer_values);
    gv.wafer_spread_pct = maxmin_spread_percent(wafer_values);

    std::vector<double> chip_cvs;
    std::vector<double> chip_means;
    for (const auto& [chip, rs] : bucket.r_by_chip) {
      std::vector<double> kept;
      for (double v : rs)
        if (!removed_set.count(v)) kept.push_back(v);
      if (kept.size() < 2) {
        gv.skipped_chips.push_back(chip);
        continue;
      }
      chip_cvs.push_back(cv_percent(kept));
      chip_means.push_back(mean(kept));
    }
    if (!chip_cvs.empty()) gv.chip_cv_mean_pct = mean(chip_cvs);
    if (chip_means.size() >= 2) gv.interchip_cv_pct = cv_percent(chip_means);

    report.groups.push_back(std::move(gv));
  }

  // A dataset whose every site is open (e.g. both films deposited at normal
  // incidence) still yields a report: warnings plus the yield figure.
  return report;
}

std::string VariationReport::to_text() const {
  std::ostringstream os;
  os << "group      n_used  n_open  outliers  mean_R_ohm   wafer_CV%  chip_CV%  interchip_CV%  spread%\n";
  for (const auto& g : groups) {
    char line[256];
    std::snprintf(line, sizeof(line), "%-10s %6d  %6d  %8d  %10.1f  %9.2f  %8.2f  %13.2f  %7.2f\n",
                  g.group.c_str(), g.n_used, g.n_open, g.n_outliers, g.mean_r_ohm,
                  g.wafer_cv_pct, g.chip_cv_mean_pct, g.interchip_cv_pct, g.wafer_spread_pct);
    os << line;
  }
  os << "yield: " << fmt("%.4f", yield_fraction) << "\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

std::string VariationReport::to_csv() const {
  std::ostringstream os;
  os << "group,n_total,n_open,n_outliers,n_used,mean_r_ohm,wafer_cv_pct,chip_cv_mean_pct,"
        "interchip_cv_pct,wafer_spread_pct\n";
  for (const auto& g : groups) {
    char line[256];
    std::snprintf(line, sizeof(line), "%s,%d,%d,%d,%d,%.4f,%.4f,%.4f,%.4f,%.4f\n",
                  g.group.c_str(), g.n_total, g.n_open, g.n_outliers, g.n_used, g.mean_r_ohm,
                  g.wafer_cv_pct, g.chip_cv_mean_pct, g.interchip_cv_pct, g.wafer_spread_pct);
    os << line;
  }
  return os.str();
}

double Heatmap::gradient_magnitude() const { return std::hypot(grad_x, grad_y); }

bool Heatmap::cell_empty(int ix, int iy) const {
  return cell_count[static_cast<std::size_t>(iy) * nx + ix] == 0;
}

MetricFn metric_by_name(const std::string& name) {
  if (name == "lw_top_nm")
    return [](const JunctionRecord& r) -> std::optional<double> { return r.lw_top_nm; };
  if (name == "lw_bot_nm")
    return [](const JunctionRecord& r) -> std::optional<double> { return r.lw_bot_nm; };
  if (name == "r_ohm")
    return [](const JunctionRecord& r) -> std::optional<double> {
      if (r.regime == geom::OverlapRegime::None || !(r.r_ohm > 0.0)) return std::nullopt;
      return r.r_ohm;
    };
  if (name == "area_um2")
    return [](const JunctionRecord& r) -> std::optional<double> {
      if (r.regime == geom::OverlapRegime::None) return std::nullopt;
      return r.area_um2;
    };
  throw std::invalid_argument("unknown metric: " + name +
                              " (expected lw_top_nm, lw_bot_nm, r_ohm or area_um2)");
}

std::vector<std::string> metric_names() { return {"lw_top_nm", "lw_bot_nm", "r_ohm", "area_um2"}; }

Heatmap heatmap(const JunctionDataset& ds, const MetricFn& metric, int nx, int ny,
                double size_x_mm, double size_y_mm, const std::string& group_filter) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("heatmap: grid must be at least 1x1");
  if (!(size_x_mm > 0.0) || !(size_y_mm > 0.0))
    throw std::invalid_argument("heatmap: substrate size must be > 0");

  Heatmap hm;
  hm.nx = nx;
  hm.ny = ny;
  hm.x0 = 0.0;
  hm.y0 = 0.0;
  hm.dx = size_x_mm / nx;
  hm.dy = size_y_mm / ny;
  hm.cell_mean.assign(static_cast<std::size_t>(nx) * ny, kNaN);
  hm.cell_count.assign(static_cast<std::size_t>(nx) * ny, 0);
  std::vector<double> sums(static_cast<std::size_t>(nx) * ny, 0.0);

  // The plane is fitted on the records themselves, so exact-plane data is
  // recovered exactly; the grid only aggregates for display.
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0, sv = 0, sxv = 0, syv = 0;
  std::set<double> xs, ys;
  for (const auto& rec : ds.records) {
    if (!group_filter.empty() && rec.group != group_filter) continue;
    const auto v = metric(rec);
    if (!v) continue;
    int ix = static_cast<int>((rec.x_mm - hm.x0) / hm.dx);
    int iy = static_cast<int>((rec.y_mm - hm.y0) / hm.dy);
    ix = std::clamp(ix, 0, nx - 1);
    iy = std::clamp(iy, 0, ny - 1);
    const std::size_t idx = static_cast<std::size_t>(iy) * nx + ix;
    sums[idx] += *v;
    hm.cell_count[idx]++;

    sw += 1;
    sx += rec.x_mm;
    sy += rec.y_mm;
    sxx += rec.x_mm * rec.x_mm;
    sxy += rec.x_mm * rec.y_mm;
    syy += rec.y_mm * rec.y_mm;
    sv += *v;
    sxv += rec.x_mm * *v;
    syv += rec.y_mm * *v;
    xs.insert(rec.x_mm);
    ys.insert(rec.y_mm);
  }
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const std::size_t idx = static_cast<std::size_t>(iy) * nx + ix;
      if (hm.cell_count[idx] > 0) hm.cell_mean[idx] = sums[idx] / hm.cell_count[idx];
    }
  if (sw < 3 || (xs.size() < 2 && ys.size() < 2))
    throw std::invalid_argument("heatmap: need at least 3 non-collinear positions");

  // Solve the 3x3 normal equations by Cramer's rule.
  const double a11 = sw, a12 = sx, a13 = sy;
  const double a22 = sxx, a23 = sxy, a33 = syy;
  const double det = a11 * (a22 * a33 - a23 * a23) - a12 * (a12 * a33 - a23 * a13) +
                     a13 * (a12 * a23 - a22 * a13);
  if (std::abs(det) < 1e-12 * std::max(1.0, a22 * a33))
    throw std::invalid_argument("heatmap: occupied cells are collinear, plane fit is singular");

  const double b1 = sv, b2 = sxv, b3 = syv;
  const double det_a = b1 * (a22 * a33 - a23 * a23) - a12 * (b2 * a33 - a23 * b3) +
                       a13 * (b2 * a23 - a22 * b3);
  const double det_b = a11 * (b2 * a33 - a23 * b3) - b1 * (a12 * a33 - a23 * a13) +
                       a13 * (a12 * b3 - b2 * a13);
  const double det_c = a11 * (a22 * b3 - b2 * a23) - a12 * (a12 * b3 - b2 * a13) +
                       b1 * (a12 * a23 - a22 * a13);
  hm.plane_offset = det_a / det;
  hm.grad_x = det_b / det;
  hm.grad_y = det_c / det;
  return hm;
}

AreaResistanceFit area_resistance_fit(const JunctionDataset& ds) {
  std::vector<double> la, lr;
  std::map<std::string, std::vector<std::size_t>> by_group;
  AreaResistanceFit fit;
  for (const auto& rec : ds.records) {
    if (!(rec.area_um2 > 0.0) || !(rec.r_ohm > 0.0) ||
        rec.regime == geom::OverlapRegime::None) {
      fit.n_rejected++;
      continue;
    }
    by_group[rec.group].push_back(la.size());
    la.push_back(std::log(rec.area_um2));
    lr.push_back(std::log(rec.r_ohm));
  }
  fit.n_used = static_cast<int>(la.size());
  if (fit.n_used < 3)
    throw std::invalid_argument("area_resistance_fit: need at least 3 usable records");

  const double n = static_cast<double>(la.size());
  const double ma = mean(la), mr = mean(lr);
  double saa = 0, srr = 0, sar = 0;
  for (std::size_t i = 0; i < la.size(); ++i) {
    saa += (la[i] - ma) * (la[i] - ma);
    srr += (lr[i] - mr) * (lr[i] - mr);
    sar += (la[i] - ma) * (lr[i] - mr);
  }
  if (saa == 0.0) throw std::invalid_argument("area_resistance_fit: zero area variance");
  fit.slope = sar / saa;
  fit.r_pooled = (srr > 0.0) ? std::abs(sar / std::sqrt(saa * srr)) : 0.0;

  // Group-centered correlation: remove per-group means first.
  double caa = 0, crr = 0, car = 0;
  for (const auto& [group, idxs] : by_group) {
    if (idxs.size() < 2) continue;
    double ga = 0, gr = 0;
    for (auto i : idxs) {
      ga += la[i];
      gr += lr[i];
    }
    ga /= static_cast<double>(idxs.size());
    gr /= static_cast<double>(idxs.size());
    for (auto i : idxs) {
      caa += (la[i] - ga) * (la[i] - ga);
      crr += (lr[i] - gr) * (lr[i] - gr);
      car += (la[i] - ga) * (lr[i] - gr);
    }
  }
  fit.r_within = (caa > 0.0 && crr > 0.0) ? std::abs(car / std::sqrt(caa * crr)) : fit.r_pooled;
  (void)n;
  return fit;
}

}  // namespace jfab::stats
