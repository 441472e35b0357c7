#include <benchmark/benchmark.h>

#include "jfab/run_config.hpp"
#include "jfab/stats.hpp"
#include "jfab/wafer.hpp"

using namespace jfab;

static void BM_SimulateWafer(benchmark::State& state) {
  const auto rc = cfg::bundled_wafer_45deg();
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto ds = wafer::simulate_wafer(rc.layout, rc.sim, seed++);
    benchmark::DoNotOptimize(ds.records.data());
  }
  state.SetItemsProcessed(state.iterations() * rc.layout.sites.size());
}
BENCHMARK(BM_SimulateWafer)->Unit(benchmark::kMillisecond);

static void BM_VariationReport(benchmark::State& state) {
  const auto rc = cfg::bundled_wafer_45deg();
  const auto ds = wafer::simulate_wafer(rc.layout, rc.sim, 0);
  for (auto _ : state) {
    auto rep = stats::variation_report(ds);
    benchmark::DoNotOptimize(rep.groups.data());
  }
}
BENCHMARK(BM_VariationReport);

static void BM_SampleEdge(benchmark::State& state) {
  wafer::LerModel ler;
  StreamRng rng(0, 0);
  for (auto _ : state) {
    auto prof = wafer::sample_edge_nm(2000.0, ler, 45.0, rng);
    benchmark::DoNotOptimize(prof.data());
  }
}
BENCHMARK(BM_SampleEdge);

BENCHMARK_MAIN();
