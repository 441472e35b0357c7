#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jfab/dataset.hpp"

namespace jfab::stats {

double mean(std::span<const double> values);
double sample_stddev(std::span<const double> values);

// Coefficient of variation in percent: sample sigma / mean * 100.
// Requires n >= 2 and mean != 0.
double cv_percent(std::span<const double> values);

// (max - min) / mean * 100; the alternative "spread" convention.
double maxmin_spread_percent(std::span<const double> values);

struct FilterResult {
  std::vector<double> kept;
  std::vector<double> removed;
};

// Iteratively drops points beyond 3 sigma of the current mean until the set
// is stable, at most 3 passes. Requires n >= 8.
FilterResult three_sigma_filter(std::span<const double> values);

struct GroupVariation {
  std::string group;
  int n_total = 0;
  int n_open = 0;        // regime None records (yield loss), never in stats
  int n_outliers = 0;    // removed by the 3-sigma policy
  int n_used = 0;
  double mean_r_ohm = 0.0;
  double wafer_cv_pct = 0.0;
  double chip_cv_mean_pct = 0.0;   // mean of per-chip CVs
  double interchip_cv_pct = 0.0;   // CV of chip means
  double wafer_spread_pct = 0.0;   // (max-min)/mean convention
  std::vector<std::string> skipped_chips;  // chips with < 2 usable records
};

struct VariationReport {
  std::vector<GroupVariation> groups;
  double yield_fraction = 1.0;  // usable records / total records
  std::vector<std::string> warnings;

  std::string to_text() const;
  std::string to_csv() const;
};

struct ReportOptions {
  bool apply_outlier_filter = true;
};

// Three-level resistance variation hierarchy (wafer / chip / inter-chip)
// per area group, after the outlier policy.
VariationReport variation_report(const JunctionDataset& ds, const ReportOptions& opts = {});

struct Heatmap {
  int nx = 0, ny = 0;
  double x0 = 0.0, y0 = 0.0, dx = 0.0, dy = 0.0;
  std::vector<double> cell_mean;   // nx*ny, row-major (iy*nx+ix); NaN = empty
  std::vector<int> cell_count;
  double grad_x = 0.0;  // plane-fit gradient, metric units per mm
  double grad_y = 0.0;
  double plane_offset = 0.0;

  double gradient_magnitude() const;
  bool cell_empty(int ix, int iy) const;
};

using MetricFn = std::function<std::optional<double>(const JunctionRecord&)>;

// Named metric column accessor; r_ohm/area skip regime-None records.
MetricFn metric_by_name(const std::string& name);  // throws on unknown name
std::vector<std::string> metric_names();

// Grid of cell means over the wafer plus a least-squares plane fit through
// the non-empty cell centers. Throws if fewer than 3 non-collinear cells.
Heatmap heatmap(const JunctionDataset& ds, const MetricFn& metric, int nx, int ny,
                double size_x_mm, double size_y_mm,
                const std::string& group_filter = "");

struct AreaResistanceFit {
  double slope = 0.0;        // d(ln R)/d(ln A) over all usable records
  double r_pooled = 0.0;     // |Pearson r| of pooled (ln A, ln R) pairs
  double r_within = 0.0;     // |Pearson r| after per-group mean removal
  int n_used = 0;
  int n_rejected = 0;        // nonpositive area or resistance
};

// Log-log least squares of resistance vs area. The pooled correlation is
// dominated by the spacing of the area groups; the group-centered one
// measures how tightly R tracks A within a group.
AreaResistanceFit area_resistance_fit(const JunctionDataset& ds);

}  // namespace jfab::stats
