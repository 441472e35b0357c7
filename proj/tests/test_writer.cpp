#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <vector>

#include "jfab/rng.hpp"
#include "jfab/stats.hpp"
#include "jfab/writer.hpp"

using namespace jfab;
using namespace jfab::writer;

TEST_SUITE("writer") {

TEST_CASE("lw 3-sigma lookup") {
  const auto model = LwNoiseModel::calibrated_default();
  CHECK(lw_3sigma_nm(model, 500.0) == doctest::Approx(17.4));
  CHECK(lw_3sigma_nm(model, 100.0) == doctest::Approx(7.1));
  CHECK(lw_3sigma_nm(model, 50.0) == doctest::Approx(7.1));   // flat below 100
  CHECK(lw_3sigma_nm(model, 20.0) == doctest::Approx(7.1));
  CHECK(lw_3sigma_nm(model, 800.0) == doctest::Approx(17.4)); // flat above 500
  // 200 um: log-linear between the knots
  const double expected = 7.1 + (17.4 - 7.1) * std::log(2.0) / std::log(5.0);
  CHECK(lw_3sigma_nm(model, 200.0) == doctest::Approx(expected).epsilon(1e-9));
  CHECK_THROWS(lw_3sigma_nm(model, 0.0));
}

TEST_CASE("placement lookup") {
  const auto model = LwNoiseModel::calibrated_default();
  CHECK(placement_max_nm(model, 500.0) == doctest::Approx(41.0));
  CHECK(placement_max_nm(model, 200.0) == doctest::Approx(33.0));
}

TEST_CASE("realized means reproduce the calibration table") {
  const auto model = LwNoiseModel::calibrated_default();
  WriterConfig along;  // defaults: FS 100, step 2, Along
  WriterConfig across = along;
  across.scan_direction = ScanDirection::Across;

  // along: floor to 5 nm grid, -1 nm bias
  CHECK(realized_mean_nm(100, along, model) == doctest::Approx(99.0));
  CHECK(realized_mean_nm(103, along, model) == doctest::Approx(99.0));
  CHECK(realized_mean_nm(105, along, model) == doctest::Approx(104.0));
  // across: floor to the step grid, -4 nm bias
  CHECK(realized_mean_nm(100, across, model) == doctest::Approx(96.0));
  CHECK(realized_mean_nm(103, across, model) == doctest::Approx(98.0));
  CHECK(realized_mean_nm(105, across, model) == doctest::Approx(100.0));

  // along means of 100 and 103 identical; across means of 103 and 105 differ
  CHECK(realized_mean_nm(100, along, model) == realized_mean_nm(103, along, model));
  CHECK(realized_mean_nm(105, across, model) - realized_mean_nm(103, across, model) >=
        across.step_size_nm);
}

TEST_CASE("exact grid multiple with zero bias and zero noise is the identity") {
  LwNoiseModel model = LwNoiseModel::calibrated_default();
  model.bias_along_nm = 0.0;
  model.sigma3_by_field_size_nm = {{100.0, 0.0}};
  WriterConfig cfg;
  StreamRng rng(0, 0);
  CHECK(realized_linewidth_nm(150.0, cfg, model, rng) == doctest::Approx(150.0));
}

TEST_CASE("realized mean is non-decreasing in the nominal width") {
  const auto model = LwNoiseModel::calibrated_default();
  for (ScanDirection dir : {ScanDirection::Along, ScanDirection::Across}) {
    WriterConfig cfg;
    cfg.scan_direction = dir;
    double prev = -1e9;
    for (double nominal = 80.0; nominal <= 700.0; nominal += 1.0) {
      const double m = realized_mean_nm(nominal, cfg, model);
      CHECK(m >= prev);
      prev = m;
    }
  }
}

TEST_CASE("sampled 3-sigma matches the model within 5%") {
  const auto model = LwNoiseModel::calibrated_default();
  WriterConfig cfg;
  cfg.field_size_um = 500.0;
  StreamRng rng(17, 0);
  std::vector<double> vals(20000);
  for (auto& v : vals) v = realized_linewidth_nm(100.0, cfg, model, rng);
  const double s3 = 3.0 * stats::sample_stddev(vals);
  CHECK(std::abs(s3 / lw_3sigma_nm(model, 500.0) - 1.0) < 0.05);
}

TEST_CASE("nonpositive nominal is rejected") {
  const auto model = LwNoiseModel::calibrated_default();
  WriterConfig cfg;
  StreamRng rng(0, 0);
  CHECK_THROWS(realized_linewidth_nm(0.0, cfg, model, rng));
  CHECK_THROWS(realized_linewidth_nm(-5.0, cfg, model, rng));
}

TEST_CASE("minimum step from the pattern-generator clock") {
  CHECK(calc_min_step_nm(50.0, 180.0, 200.0) == doctest::Approx(1.5));
  // 4x the current doubles the step
  CHECK(calc_min_step_nm(50.0, 180.0, 800.0) ==
        doctest::Approx(2.0 * calc_min_step_nm(50.0, 180.0, 200.0)));
  // 4x lower dose doubles the step
  CHECK(calc_min_step_nm(50.0, 45.0, 200.0) ==
        doctest::Approx(2.0 * calc_min_step_nm(50.0, 180.0, 200.0)));
  CHECK_THROWS(calc_min_step_nm(0.0, 180.0, 200.0));
}

TEST_CASE("studied-set membership flag") {
  WriterConfig cfg;
  CHECK_FALSE(cfg.extrapolated());
  cfg.field_size_um = 200.0;
  cfg.step_size_nm = 5.0;
  CHECK_FALSE(cfg.extrapolated());
  cfg.field_size_um = 350.0;
  CHECK(cfg.extrapolated());
  cfg.field_size_um = 100.0;
  cfg.step_size_nm = 4.0;
  CHECK(cfg.extrapolated());
}

TEST_CASE("model JSON round trip and validation") {
  auto model = LwNoiseModel::calibrated_default();
  model.bias_across_nm = -3.5;
  const auto restored = LwNoiseModel::from_json(model.to_json());
  CHECK(restored.bias_across_nm == doctest::Approx(-3.5));
  CHECK(lw_3sigma_nm(restored, 500.0) == doctest::Approx(17.4));

  LwNoiseModel bad;
  bad.sigma3_by_field_size_nm = {{100.0, 9.0}, {500.0, 3.0}};  // decreasing
  CHECK_THROWS(bad.validate());
}

}  // TEST_SUITE
