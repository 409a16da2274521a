#include <benchmark/benchmark.h>

#include "rswalk/classify.hpp"
#include "rswalk/config.hpp"
#include "rswalk/hitting.hpp"
#include "rswalk/simulate.hpp"
#include "rswalk/spectral.hpp"

using namespace rswalk;

namespace {

void BM_SolveWindow(benchmark::State& state) {
  const auto c = preset("game-c");
  const auto e = c.model.realize(c.window, c.seed);
  const long half = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_window(c.model, e, 0, {-half, half}, BoundaryMode::Killed));
  }
  state.SetComplexityN(2 * half + 1);
}
BENCHMARK(BM_SolveWindow)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oN);

void BM_ExactSpectrum(benchmark::State& state) {
  const auto c = preset("game-c");
  const auto e = c.model.realize(c.window, c.seed);
  const TransferBuilder b(c.model);
  for (auto _ : state) benchmark::DoNotOptimize(exact_periodic_spectrum(b, e));
}
BENCHMARK(BM_ExactSpectrum);

void BM_IterativeSpectrum(benchmark::State& state) {
  const auto c = preset("game-c");
  const auto e = c.model.realize({-1, static_cast<long>(state.range(0)) + 1}, c.seed);
  const TransferBuilder b(c.model);
  SpectrumOptions opts;
  opts.force_iterative = true;
  opts.qr.n_steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(forward_spectrum(b, e, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IterativeSpectrum)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const auto c = preset("game-d");
  const auto e = c.model.realize(c.window, c.seed);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run(c.model, e, {0, 100}, n, c.seed, n));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)->Arg(10000)->Arg(1000000);

void BM_ClassifyFull(benchmark::State& state) {
  const auto c = preset("game-c");
  const auto e = c.model.realize(c.window, c.seed);
  for (auto _ : state) benchmark::DoNotOptimize(classify_full(c.model, e));
}
BENCHMARK(BM_ClassifyFull)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
