#include <benchmark/benchmark.h>

#include "qmoney/linalg.hpp"
#include "qmoney/operators.hpp"
#include "qmoney/security.hpp"
#include "qmoney/states.hpp"

using namespace qmoney;

static void BM_BuildStates(benchmark::State& state) {
  const bool randomized = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_states(0.5, randomized));
  }
}
BENCHMARK(BM_BuildStates)->Arg(0)->Arg(1);

static void BM_BuildOps(benchmark::State& state) {
  const Terminal terminal = state.range(0) ? Terminal::kUntrusted : Terminal::kTrusted;
  const StateFamily f = build_states(0.5, state.range(1) != 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_ops(f, terminal));
  }
}
BENCHMARK(BM_BuildOps)->Args({0, 0})->Args({0, 1})->Args({1, 0})->Args({1, 1})->Unit(benchmark::kMillisecond);

static void BM_Kron(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const ComplexMatrix a = ComplexMatrix::Random(n, n), b = ComplexMatrix::Random(n, n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(kron(a, b).data());
  }
}
BENCHMARK(BM_Kron)->RangeMultiplier(2)->Range(4, 32);

static void BM_MinLoss(benchmark::State& state) {
  ScenarioConfig c;
  c.terminal = state.range(0) ? Terminal::kUntrusted : Terminal::kTrusted;
  c.phase_randomized = state.range(1) != 0;
  c.mu = 0.5;
  c.error_target = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_loss_sdp(c).f_d);
  }
}
BENCHMARK(BM_MinLoss)->Args({0, 0})->Args({0, 1})->Args({1, 0})->Unit(benchmark::kMillisecond);

static void BM_MinError(benchmark::State& state) {
  ScenarioConfig c;
  c.phase_randomized = state.range(0) != 0;
  c.mu = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_error_sdp(c).e_star);
  }
}
BENCHMARK(BM_MinError)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
