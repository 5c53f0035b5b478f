// Serial reference vs OpenMP shooting over a rate grid.
//
//   ./bench_scan --benchmark_counters_tabular=true
//
// Each shot integrates the nonautonomous system from t_start to T, so the
// per-rate cost is uniform enough that dynamic scheduling mostly matters for
// rates that blow up early.

#include <benchmark/benchmark.h>

#include <thread>

#include "ratetip/tracking.hpp"

using namespace ratetip;

namespace {

PullbackRunConfig bench_run() {
  PullbackRunConfig run;
  run.z_init = auto_z_init(NonautonomousSpec{});
  run.T = 100.0;
  return run;
}

void BM_ShootSerial(benchmark::State& state) {
  const NonautonomousSpec spec;
  const auto run = bench_run();
  const auto rates = rate_grid(0.9, 1.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(shoot_rates_serial(spec, run, rates));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ShootParallel(benchmark::State& state) {
  const NonautonomousSpec spec;
  const auto run = bench_run();
  const auto rates = rate_grid(0.9, 1.0, static_cast<std::size_t>(state.range(0)));
  const int jobs = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(shoot_rates(spec, run, rates, jobs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["jobs"] = jobs;
}

void parallel_args(benchmark::internal::Benchmark* b) {
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (int n : {16, 64})
    for (int j = 1; j <= hw; j *= 2) b->Args({n, j});
}

}  // namespace

BENCHMARK(BM_ShootSerial)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ShootParallel)->Apply(parallel_args)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
