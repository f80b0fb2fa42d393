// Serial reference vs OpenMP kernels. Thread count follows TSM_THREADS.

#include <benchmark/benchmark.h>

#include "tsm/oracle.hpp"
#include "tsm/population.hpp"
#include "tsm/scenarios.hpp"
#include "tsm/sweep.hpp"

namespace {

tsm::Execution mode(const benchmark::State& state) {
  return state.range(0) ? tsm::Execution::parallel : tsm::Execution::serial;
}

void BM_Population(benchmark::State& state) {
  tsm::PopulationSpec spec;
  spec.n_providers = 20000;
  for (auto _ : state) benchmark::DoNotOptimize(tsm::sample_population(spec, mode(state)));
  state.SetItemsProcessed(state.iterations() * spec.n_providers);
}

void BM_TwoSidedDeclaredPrice(benchmark::State& state) {
  tsm::PopulationSpec spec;
  spec.n_providers = 2000;
  const tsm::Population pop = tsm::sample_population(spec);
  for (auto _ : state)
    benchmark::DoNotOptimize(tsm::run_two_sided(pop, tsm::TwoSidedMode::declared_price, mode(state)));
  state.SetItemsProcessed(state.iterations() * spec.n_providers);
}

void BM_ExternalitySweep(benchmark::State& state) {
  tsm::SweepSpec spec;
  spec.grid = tsm::linear_grid(0.1, 0.7, 13);
  spec.mode = tsm::TwoSidedMode::declared_price;
  for (auto _ : state) benchmark::DoNotOptimize(tsm::run_sweep(spec, mode(state)));
}

void BM_Oracle(benchmark::State& state) {
  tsm::MarketParams p;
  p.alpha = 0.48;
  p.beta = 1.81;
  p.gamma = 0.25;
  p.phi = 0.39;
  p.k1 = 0.78;
  p.f_c = 0.43;
  for (auto _ : state) benchmark::DoNotOptimize(tsm::oracle_equilibrium(p, 2000, mode(state)));
}

}  // namespace

// Arg 0 = serial reference, 1 = parallel.
BENCHMARK(BM_Population)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TwoSidedDeclaredPrice)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ExternalitySweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Oracle)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
