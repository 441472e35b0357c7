#include <benchmark/benchmark.h>

#include "jfab/dose.hpp"

using namespace jfab::dose;

static void BM_DoseAtPoint(benchmark::State& state) {
  const auto layout = reference_layout(true);
  const auto psf = preset_mma_pmma_a4().psf;
  double x = -3.0;
  for (auto _ : state) {
    x += 0.001;
    if (x > 3.0) x = -3.0;
    benchmark::DoNotOptimize(dose_at_point(layout, psf, x, 0.1));
  }
}
BENCHMARK(BM_DoseAtPoint);

static void BM_DoseMap(benchmark::State& state) {
  const auto layout = reference_layout(true);
  const auto psf = preset_mma_pmma_a4().psf;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto grid = dose_map(layout, psf, Region{-8, -8, 8, 8}, n, n);
    benchmark::DoNotOptimize(grid.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_DoseMap)->Arg(32)->Arg(128);

static void BM_LinewidthBias(benchmark::State& state) {
  const auto layout = reference_layout(true);
  const auto preset = preset_mma_pmma_a4();
  for (auto _ : state)
    benchmark::DoNotOptimize(linewidth_bias_nm(layout, preset, reference_feature_index()));
}
BENCHMARK(BM_LinewidthBias);
