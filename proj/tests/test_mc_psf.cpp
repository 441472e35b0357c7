#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "jfab/mc_psf.hpp"

using namespace jfab::mcpsf;

namespace {

BeamConfig small_beam(std::uint64_t seed = 0) {
  BeamConfig beam;
  beam.energy_kev = 50.0;
  beam.electron_count = 10000;  // minimum allowed; acceptance runs 1e5
  beam.rng_seed = seed;
  return beam;
}

}  // namespace

TEST_SUITE("mc_psf") {

TEST_CASE("configuration validation") {
  BeamConfig beam = small_beam();
  beam.electron_count = 0;
  CHECK_THROWS(simulate_psf(silicon_bilayer_stack(), beam));
  beam.electron_count = 100;
  CHECK_THROWS(simulate_psf(silicon_bilayer_stack(), beam));
  beam = small_beam();
  beam.energy_kev = 0.5;
  CHECK_THROWS(simulate_psf(silicon_bilayer_stack(), beam));
  CHECK_THROWS(simulate_psf({}, small_beam()));
}

TEST_CASE("determinism: identical runs are bit-identical") {
  const auto stack = silicon_bilayer_stack();
  const auto h1 = simulate_psf(stack, small_beam(42));
  const auto h2 = simulate_psf(stack, small_beam(42));
  REQUIRE(h1.energy_kev.size() == h2.energy_kev.size());
  for (std::size_t i = 0; i < h1.energy_kev.size(); ++i)
    CHECK(h1.energy_kev[i] == h2.energy_kev[i]);
  CHECK(h1.escaped_kev == h2.escaped_kev);
  CHECK(h1.deposited_other_kev == h2.deposited_other_kev);

  const auto h3 = simulate_psf(stack, small_beam(43));
  bool any_diff = false;
  for (std::size_t i = 0; i < h1.energy_kev.size(); ++i)
    if (h1.energy_kev[i] != h3.energy_kev[i]) any_diff = true;
  CHECK(any_diff);
}

TEST_CASE("energy conservation") {
  const auto hist = simulate_psf(silicon_bilayer_stack(), small_beam(7));
  const double total_in = 50.0 * static_cast<double>(hist.electrons);
  const double accounted =
      hist.deposited_resist_kev + hist.deposited_other_kev + hist.escaped_kev;
  CHECK(std::abs(accounted - total_in) / total_in < 1e-6);
}

TEST_CASE("backscatter populates the far tail") {
  const auto hist = simulate_psf(silicon_bilayer_stack(), small_beam(1));
  double far_energy = 0.0;
  for (std::size_t i = 0; i < hist.energy_kev.size(); ++i)
    if (hist.bin_center_um(i) > 1.0) far_energy += hist.energy_kev[i];
  CHECK(far_energy > 0.0);
  CHECK(hist.escaped_kev > 0.0);  // some electrons leave through the top
}

TEST_CASE("double-Gaussian fit round-trips exact synthetic data within 2%") {
  jfab::dose::PsfParams truth;
  truth.alpha_fwd_um = 0.05;
  truth.beta_back_um = 9.0;
  truth.eta = 0.7;
  const auto hist = synthetic_histogram(truth, 1.25);
  const auto fit = fit_double_gaussian(hist);
  CHECK(fit.params.alpha_fwd_um == doctest::Approx(truth.alpha_fwd_um).epsilon(0.02));
  CHECK(fit.params.beta_back_um == doctest::Approx(truth.beta_back_um).epsilon(0.02));
  CHECK(fit.params.eta == doctest::Approx(truth.eta).epsilon(0.02));
  CHECK(fit.scale_kev == doctest::Approx(1.25).epsilon(0.02));
}

TEST_CASE("degenerate histogram is rejected") {
  RadialEnergyHistogram hist;
  hist.electrons = 10000;
  hist.bin_edges_um.resize(kRadialBins + 1);
  const double log0 = std::log(kRadialMinUm);
  const double dlog = (std::log(kRadialMaxUm) - log0) / kRadialBins;
  for (int i = 0; i <= kRadialBins; ++i) hist.bin_edges_um[i] = std::exp(log0 + i * dlog);
  hist.energy_kev.assign(kRadialBins, 0.0);
  hist.energy_kev[10] = 5.0;  // everything in one bin
  hist.deposited_resist_kev = 5.0;
  CHECK_THROWS(fit_double_gaussian(hist));
}

TEST_CASE("higher-Z substrate raises the backscatter ratio") {
  // Coarse but monotone even at 1e4 electrons.
  const auto si = fit_double_gaussian(simulate_psf(silicon_bilayer_stack(), small_beam(3)));
  const auto ge = fit_double_gaussian(simulate_psf(germanium_bilayer_stack(), small_beam(3)));
  CHECK(ge.params.eta > si.params.eta);
}

TEST_CASE("histogram and psf files") {
  const auto hist = simulate_psf(silicon_bilayer_stack(), small_beam(11));
  save_histogram_csv("test_hist.csv", hist);
  const auto fit = fit_double_gaussian(hist);
  save_psf_json("test_psf.json", fit, small_beam(11));

  std::ifstream csv("test_hist.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "r_um,energy_kev,density_kev_um2_per_electron");
  std::ifstream js("test_psf.json");
  std::string all((std::istreambuf_iterator<char>(js)), std::istreambuf_iterator<char>());
  CHECK(all.find("beta_back_um") != std::string::npos);
  std::remove("test_hist.csv");
  std::remove("test_psf.json");
}

}  // TEST_SUITE
