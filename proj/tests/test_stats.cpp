#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "jfab/rng.hpp"
#include "jfab/stats.hpp"

using namespace jfab;
using namespace jfab::stats;

namespace {

JunctionRecord make_rec(const std::string& chip, double x, double y, const std::string& group,
                        double area, double r) {
  JunctionRecord rec;
  rec.chip_id = chip;
  rec.x_mm = x;
  rec.y_mm = y;
  rec.group = group;
  rec.area_um2 = area;
  rec.r_ohm = r;
  rec.regime = geom::OverlapRegime::Full;
  rec.lw_top_nm = 170.0;
  rec.lw_bot_nm = 150.0;
  return rec;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("cv_percent") {
  std::vector<double> v{9.5, 10.0, 10.5};
  CHECK(cv_percent(v) == doctest::Approx(5.0));
  std::vector<double> flat{4.0, 4.0, 4.0, 4.0};
  CHECK(cv_percent(flat) == doctest::Approx(0.0));
  // scale invariance
  std::vector<double> scaled;
  for (double x : v) scaled.push_back(x * 7.25);
  CHECK(cv_percent(scaled) == doctest::Approx(cv_percent(v)));
  std::vector<double> one{1.0};
  CHECK_THROWS(cv_percent(one));
}

TEST_CASE("three sigma filter") {
  SUBCASE("clean gaussian keeps almost everything") {
    StreamRng rng(1, 0);
    std::vector<double> v(1000);
    for (auto& x : v) x = rng.normal(100.0, 5.0);
    const auto fr = three_sigma_filter(v);
    CHECK(fr.removed.size() <= 10);  // <= 1%
  }
  SUBCASE("single gross outlier removed exactly") {
    std::vector<double> v(50, 10.0);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.01 * static_cast<double>(i % 7);
    v.push_back(1000.0);
    const auto fr = three_sigma_filter(v);
    REQUIRE(fr.removed.size() == 1);
    CHECK(fr.removed[0] == doctest::Approx(1000.0));
  }
  SUBCASE("identical values untouched") {
    std::vector<double> v(20, 3.5);
    const auto fr = three_sigma_filter(v);
    CHECK(fr.removed.empty());
    CHECK(fr.kept.size() == 20);
  }
  SUBCASE("needs at least 8 points") {
    std::vector<double> v(7, 1.0);
    CHECK_THROWS(three_sigma_filter(v));
  }
}

TEST_CASE("heatmap plane recovery is exact") {
  JunctionDataset ds;
  const double a = 3.0, b = 0.25, c = -0.125;
  StreamRng rng(2, 0);
  for (int i = 0; i < 400; ++i) {
    const double x = rng.uniform() * 20.0 + 1.0;
    const double y = rng.uniform() * 20.0 + 1.0;
    auto rec = make_rec("C1", x, y, "g", 0.02, a + b * x + c * y);
    ds.records.push_back(rec);
  }
  // Use r_ohm as the metric; every cell mean sits exactly on the plane only
  // if each record does, so fit on the raw plane metric.
  const auto hm = heatmap(ds, metric_by_name("r_ohm"), 10, 10, 22.0, 22.0);
  CHECK(hm.grad_x == doctest::Approx(b).epsilon(1e-9));
  CHECK(hm.grad_y == doctest::Approx(c).epsilon(1e-9));

  SUBCASE("constant metric gives zero gradient") {
    for (auto& r : ds.records) r.r_ohm = 42.0;
    const auto flat = heatmap(ds, metric_by_name("r_ohm"), 10, 10, 22.0, 22.0);
    CHECK(std::abs(flat.grad_x) < 1e-12);
    CHECK(std::abs(flat.grad_y) < 1e-12);
  }
}

TEST_CASE("heatmap rejects collinear occupancy") {
  JunctionDataset ds;
  for (int i = 0; i < 30; ++i)
    ds.records.push_back(make_rec("C1", 1.0 + i * 0.6, 11.0, "g", 0.02, 100.0 + i));
  CHECK_THROWS(heatmap(ds, metric_by_name("r_ohm"), 10, 10, 22.0, 22.0));
}

TEST_CASE("area-resistance fit on noiseless data recovers the exact law") {
  JunctionDataset ds;
  const double ra = 150.0;
  StreamRng rng(3, 0);
  for (int i = 0; i < 500; ++i) {
    const double area = 0.005 * std::exp(rng.uniform() * 3.2);
    ds.records.push_back(make_rec("C1", 1 + rng.uniform() * 20, 1 + rng.uniform() * 20, "g",
                                  area, ra / area));
  }
  const auto fit = area_resistance_fit(ds);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(fit.r_pooled == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.r_within == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.n_rejected == 0);
}

TEST_CASE("single-group multiplicative noise lowers the within correlation") {
  StreamRng rng(4, 0);
  JunctionDataset ds;
  for (int i = 0; i < 2000; ++i) {
    const double area = 0.0255 * std::exp(0.03 * rng.normal());
    const double noise = std::exp(0.03 * rng.normal());
    ds.records.push_back(make_rec("C1", 1 + rng.uniform() * 20, 1 + rng.uniform() * 20, "g",
                                  area, 150.0 / area * noise));
  }
  const auto fit = area_resistance_fit(ds);
  CHECK(fit.r_within < 0.95);
  CHECK(fit.r_within > 0.4);
}

TEST_CASE("variation report hierarchy") {
  StreamRng rng(5, 0);
  JunctionDataset ds;
  // two groups, four chips, chip offsets create inter-chip spread
  const double chip_x[] = {3.0, 14.0, 3.0, 14.0};
  const double chip_y[] = {4.0, 4.0, 15.0, 15.0};
  for (int chip = 0; chip < 4; ++chip) {
    const double chip_bias = 1.0 + 0.02 * chip;
    for (int i = 0; i < 200; ++i) {
      for (const char* g : {"a", "b"}) {
        const double base = g[0] == 'a' ? 6000.0 : 15000.0;
        const double r = base * chip_bias * (1.0 + 0.03 * rng.normal());
        ds.records.push_back(make_rec("C" + std::to_string(chip), chip_x[chip] + rng.uniform() * 5,
                                      chip_y[chip] + rng.uniform() * 3, g, 0.02, r));
      }
    }
  }
  const auto rep = variation_report(ds);
  REQUIRE(rep.groups.size() == 2);
  for (const auto& g : rep.groups) {
    CHECK(g.n_used > 0);
    // law of total variance, with sampling slack
    CHECK(g.chip_cv_mean_pct <= g.wafer_cv_pct * 1.10);
    CHECK(g.wafer_spread_pct > g.wafer_cv_pct);
  }

  SUBCASE("identical resistances give zero at every level") {
    for (auto& r : ds.records) r.r_ohm = 5000.0;
    const auto flat = variation_report(ds);
    for (const auto& g : flat.groups) {
      CHECK(g.wafer_cv_pct == doctest::Approx(0.0));
      CHECK(g.chip_cv_mean_pct == doctest::Approx(0.0));
      CHECK(g.interchip_cv_pct == doctest::Approx(0.0));
    }
  }
  SUBCASE("regime None records count as yield loss, not statistics") {
    ds.records[0].regime = geom::OverlapRegime::None;
    ds.records[0].r_ohm = 0.0;
    const auto rep2 = variation_report(ds);
    CHECK(rep2.yield_fraction < 1.0);
  }
}

TEST_CASE("groups with too few records are skipped with a warning") {
  JunctionDataset ds;
  for (int i = 0; i < 20; ++i)
    ds.records.push_back(make_rec("C1", 1.0 + i, 2.0, "big", 0.02, 5000.0 + i));
  ds.records.push_back(make_rec("C1", 5.0, 2.0, "lonely", 0.02, 9000.0));
  const auto rep = variation_report(ds);
  CHECK(rep.groups.size() == 1);
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("lonely") != std::string::npos);
}

}  // TEST_SUITE
