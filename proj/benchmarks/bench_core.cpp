#include <benchmark/benchmark.h>

#include <vector>

#include "qkdfs/feasibility.hpp"
#include "qkdfs/honest.hpp"
#include "qkdfs/montecarlo.hpp"
#include "qkdfs/reproduce.hpp"

namespace {

using namespace qkdfs;

void BM_PoissonPmf(benchmark::State& state) {
  double total = 0.0;
  for (auto _ : state) {
    for (int n = 0; n < 16; ++n) total += poisson_pmf(0.479, n);
  }
  benchmark::DoNotOptimize(total);
  state.SetItemsProcessed(state.iterations() * 16);
}
BENCHMARK(BM_PoissonPmf);

void BM_ExpectedGain(benchmark::State& state) {
  SystemParams sys = reference_system();
  double eta = overall_transmittance(sys.channel, sys.detector);
  SourceSpec src{SourceLabel::Signal, 0.479};
  for (auto _ : state) {
    benchmark::DoNotOptimize(expected_gain(src, eta, sys.detector.dark_count));
    benchmark::DoNotOptimize(expected_error_gain(src, eta,
                                                 sys.detector.dark_count,
                                                 sys.detector.misalignment));
  }
}
BENCHMARK(BM_ExpectedGain);

void BM_AnalyzeIntercept(benchmark::State& state) {
  SystemParams sys = reference_system();
  SessionStats session = reference_session();
  AttackStrategy strategy{AttackVariant::InterceptAtDistance, 0.0, 0.0, 120.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(analyze(strategy, sys, session));
  }
}
BENCHMARK(BM_AnalyzeIntercept);

void BM_SweepGrid(benchmark::State& state) {
  SystemParams sys = reference_system();
  SessionStats session = reference_session();
  std::vector<double> grid;
  for (int i = 0; i <= 120; ++i) grid.push_back(i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sweep_intercept(sys, session, grid, 1));
  }
  state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(BM_SweepGrid);

void BM_FindThresholds(benchmark::State& state) {
  SystemParams sys = reference_system();
  SessionStats session = reference_session();
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_thresholds(sys, session, 0.5));
  }
}
BENCHMARK(BM_FindThresholds);

void BM_SimulateHonest(benchmark::State& state) {
  SystemParams sys = reference_system();
  TrialConfig trial{static_cast<std::uint64_t>(state.range(0)), 7, {}, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_honest(sys, trial));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateHonest)->Arg(1 << 20);

void BM_SimulateIntercept(benchmark::State& state) {
  SystemParams sys = reference_system();
  AttackStrategy strategy{AttackVariant::InterceptAtDistance, 9.007e-2, 0.0,
                          120.0};
  TrialConfig trial{static_cast<std::uint64_t>(state.range(0)), 7, {}, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_attack(strategy, sys, trial));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateIntercept)->Arg(1 << 20);

}  // namespace

BENCHMARK_MAIN();
