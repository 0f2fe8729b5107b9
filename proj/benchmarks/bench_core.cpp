#include <benchmark/benchmark.h>

#include <random>

#include "marstab/graph.hpp"
#include "marstab/rationalize.hpp"
#include "marstab/simulate.hpp"

namespace {

using namespace marstab;

Market make_market(int couples) {
  std::mt19937_64 rng(2718);
  sim::GeneratorParams params;
  params.couples = couples;
  Market base = sim::generate_market(params, rng);
  return sim::apply_scenario(base, sim::ScenarioKind::Both, 0.1, rng);
}

void bench_edge_matrix(benchmark::State& state) {
  Market mk = make_market(static_cast<int>(state.range(0)));
  AllocationCandidate cand = equal_split_candidate(mk);
  for (auto _ : state)
    benchmark::DoNotOptimize(build_edge_matrix(mk, cand));
}
BENCHMARK(bench_edge_matrix)->Arg(10)->Arg(30);

void bench_blocking_search(benchmark::State& state) {
  Market mk = make_market(static_cast<int>(state.range(0)));
  EdgeMatrix em = build_edge_matrix(mk, equal_split_candidate(mk));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        find_blocking_structure(em, mk.committed, BlockingMode::Monotonicity));
}
BENCHMARK(bench_blocking_search)->Arg(10)->Arg(30);

void bench_path_enumeration(benchmark::State& state) {
  Market mk = make_market(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerate_permissible_paths(mk, 3));
}
BENCHMARK(bench_path_enumeration)->Arg(6)->Arg(10);

void bench_transfers_indices(benchmark::State& state) {
  Market mk = make_market(static_cast<int>(state.range(0)));
  Regime regime{RegimeKind::MutualConsentTransfers};
  for (auto _ : state)
    benchmark::DoNotOptimize(compute_stability_indices(mk, regime));
}
BENCHMARK(bench_transfers_indices)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
