#include <benchmark/benchmark.h>

#include <vector>

#include "isoeb/isotonic.hpp"
#include "isoeb/rng.hpp"

namespace {

std::vector<double> noisy_decay(std::size_t p, std::uint64_t seed) {
  isoeb::RngStream rng(seed, 0);
  std::vector<double> x(p);
  for (std::size_t i = 0; i < p; ++i)
    x[i] = 4.0 / static_cast<double>(i + 1) + rng.normal();
  return x;
}

}  // namespace

static void BM_Pava(benchmark::State& state) {
  const std::vector<double> x =
      noisy_decay(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    auto fit = isoeb::pava(x, isoeb::Cone::NonincreasingNonneg);
    benchmark::DoNotOptimize(fit.values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Pava)->RangeMultiplier(4)->Range(64, 65536)->Complexity();

static void BM_MinMaxSlopes(benchmark::State& state) {
  const std::vector<double> x =
      noisy_decay(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    auto slopes = isoeb::min_max_slopes(x);
    benchmark::DoNotOptimize(slopes.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MinMaxSlopes)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

BENCHMARK_MAIN();
