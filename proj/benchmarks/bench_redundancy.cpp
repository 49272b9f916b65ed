#include <benchmark/benchmark.h>

#include "darwinism/fragment_stats.hpp"
#include "darwinism/oracle.hpp"
#include "darwinism/report.hpp"

namespace {

using namespace darwinism;

void BM_AvgHolevoExact(benchmark::State& state) {
  const EnvironmentSpec spec{1000, state.range(0) - 1000, 0.2, 0.95};
  const std::int64_t f = spec.n_total() / 3;
  for (auto _ : state) benchmark::DoNotOptimize(avg_holevo_exact(spec, f));
}
BENCHMARK(BM_AvgHolevoExact)->RangeMultiplier(100)->Range(10'000, 1'000'000'000);

void BM_FindFragmentSize(benchmark::State& state) {
  const EnvironmentSpec spec{1000, state.range(0) - 1000};
  const DeficitSpec d(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(find_fragment_size(spec, d));
}
BENCHMARK(BM_FindFragmentSize)->RangeMultiplier(100)->Range(10'000, 1'000'000'000);

void BM_FullReport(benchmark::State& state) {
  const EnvironmentSpec spec{50, 5000, 0.2, 1.0};
  const DeficitSpec d(0.1);
  for (auto _ : state) benchmark::DoNotOptimize(full_redundancy_report(spec, d));
}
BENCHMARK(BM_FullReport);

void BM_MonteCarlo(benchmark::State& state) {
  const EnvironmentSpec spec{50, 50, 0.2, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(mc_avg_holevo(spec, 20, state.range(0), 7));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(10'000);

void BM_OracleAverage(benchmark::State& state) {
  const auto n = static_cast<std::int64_t>(state.range(0));
  const auto dense = oracle::build_spec_state({2, n - 2, 0.25, 0.75});
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        oracle::all_fragment_average(dense, static_cast<int>(n / 2), oracle::FragmentQuantity::kHolevo));
  }
}
BENCHMARK(BM_OracleAverage)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
