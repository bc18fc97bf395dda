#include <benchmark/benchmark.h>

#include "svcharme/density.hpp"
#include "svcharme/ergodicity.hpp"
#include "svcharme/simulator.hpp"

using namespace svcharme;

namespace {

ModelSpec reference() {
  const auto regime = [](double slope) {
    return RegimeFunctions{RegimeFunction::affine(0.0, slope), RegimeFunction::constant(1.0),
                           RegimeFunction::constant(0.1)};
  };
  return ModelSpec::create(TransitionMatrix::validate({{0.9, 0.1}, {0.2, 0.8}}), {regime(0.3), regime(1.1)},
                           InnovationSpec::standard_normal(), InnovationSpec::standard_normal());
}

void BM_TransitionDensity(benchmark::State& state) {
  const ModelSpec spec = reference();
  double u = -3.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(transition_density(spec, Regime(1), 0.5, u));
    u = u > 6.0 ? -3.0 : u + 0.37;
  }
}
BENCHMARK(BM_TransitionDensity);

void BM_TwoStepProbability(benchmark::State& state) {
  const ModelSpec spec = reference();
  for (auto _ : state) benchmark::DoNotOptimize(t_step_probability(spec, Regime(1), Regime(2), 0.0, -1.0, 1.0, 2));
}
BENCHMARK(BM_TwoStepProbability)->Unit(benchmark::kMillisecond);

void BM_SimulatePath(benchmark::State& state) {
  const ModelSpec spec = reference();
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path(spec, Regime(1), 0.0, n, seed++));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePath)->Arg(1'000)->Arg(100'000)->Unit(benchmark::kMicrosecond);

void BM_DistanceDecay(benchmark::State& state) {
  const ModelSpec spec = reference();
  DistanceDecayOptions options;
  options.replications = static_cast<std::size_t>(state.range(0));
  options.burn_in = 10'000;
  options.reference_length = 100'000;
  for (auto _ : state) benchmark::DoNotOptimize(distance_decay(spec, options));
}
BENCHMARK(BM_DistanceDecay)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
