#include <benchmark/benchmark.h>

#include <vector>

#include "isoeb/crossfit.hpp"
#include "isoeb/rng.hpp"
#include "isoeb/sequence.hpp"

static void BM_CrossfitEstimate(benchmark::State& state) {
  const std::size_t p = static_cast<std::size_t>(state.range(0));
  const isoeb::OrderedSparseClass cls{8, 4.0, p};
  const std::vector<double> theta =
      isoeb::adversarial_theta(isoeb::AdversarialProfile::GeometricDecay, cls);
  isoeb::RngStream sim(3, 0);
  const isoeb::SequenceProblem problem = isoeb::simulate(theta, 1.0, 8.0, sim);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    isoeb::RngStream rng(4, stream++);
    auto result = isoeb::crossfit_estimate(problem, 4.0, rng);
    benchmark::DoNotOptimize(result.posterior.mean.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CrossfitEstimate)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

static void BM_UnknownSigma(benchmark::State& state) {
  const std::size_t p = static_cast<std::size_t>(state.range(0));
  const isoeb::OrderedSparseClass cls{16, 4.0, p};
  const std::vector<double> theta =
      isoeb::adversarial_theta(isoeb::AdversarialProfile::GeometricDecay, cls);
  isoeb::RngStream sim(5, 0);
  const isoeb::SequenceProblem problem = isoeb::simulate(theta, 1.0, 8.0, sim);
  for (auto _ : state) {
    auto fit = isoeb::crossfit_unknown_sigma(problem, 16);
    benchmark::DoNotOptimize(fit.mean.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_UnknownSigma)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

BENCHMARK_MAIN();
