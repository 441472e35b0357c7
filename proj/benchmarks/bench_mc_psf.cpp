#include <benchmark/benchmark.h>

#include "jfab/mc_psf.hpp"

using namespace jfab::mcpsf;

static void BM_SimulatePsf(benchmark::State& state) {
  const auto stack = silicon_bilayer_stack();
  BeamConfig beam;
  beam.electron_count = state.range(0);
  for (auto _ : state) {
    beam.rng_seed++;
    auto hist = simulate_psf(stack, beam);
    benchmark::DoNotOptimize(hist.energy_kev.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePsf)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_FitDoubleGaussian(benchmark::State& state) {
  jfab::dose::PsfParams truth{0.05, 9.0, 0.7};
  const auto hist = synthetic_histogram(truth, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_double_gaussian(hist).params.beta_back_um);
}
BENCHMARK(BM_FitDoubleGaussian)->Unit(benchmark::kMillisecond);
