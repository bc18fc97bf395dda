#include "svcharme/simulator.hpp"

#include <cmath>

#include "svcharme/errors.hpp"
#include "svcharme/parallel.hpp"

namespace svcharme {

SimulationState::SimulationState(const ModelSpec& spec, std::uint64_t seed)
    : streams_(StreamSet::from_seed(seed)), eps_sampler_(spec.eps()), iota_sampler_(spec.iota()) {}

double step_value(const ModelSpec& spec, Regime regime, double prev_x, SimulationState& state) {
  const RegimeValues v = eval_regime(spec, regime, prev_x);
  const double eps = state.draw_eps();
  const double iota = state.draw_iota();
  const double x = v.mean + v.volatility * eps + v.skew * iota * iota;
  if (!std::isfinite(x)) throw Error(ErrorCode::non_finite_value, "step produced a non-finite value");
  return x;
}

StepResult step(const ModelSpec& spec, Regime prev_regime, double prev_x, SimulationState& state) {
  const Regime next = state.next_regime(spec.transition(), prev_regime);
  return StepResult{next, step_value(spec, next, prev_x, state)};
}

Regime stationary_initial_regime(const std::vector<double>& pi, std::uint64_t seed) {
  Engine engine(derive_seed(seed, kInitialStateStream));
  return sample_regime(pi, engine);
}

Path simulate_path(const ModelSpec& spec, Regime init_regime, double init_x, std::size_t n, std::uint64_t seed) {
  if (init_regime.label() < 1 || init_regime.label() > spec.size()) {
    throw Error(ErrorCode::invalid_init, "initial regime " + std::to_string(init_regime.label()) + " outside 1.." +
                                             std::to_string(spec.size()));
  }
  if (n == 0) throw Error(ErrorCode::invalid_init, "path length must be at least 1");
  if (!std::isfinite(init_x)) throw Error(ErrorCode::invalid_init, "initial value must be finite");

  Path path;
  path.init_regime = init_regime;
  path.init_x = init_x;
  path.seed = seed;
  path.requested_length = n;
  path.regimes.seed = seed;
  path.regimes.states.reserve(n);
  path.values.reserve(n);
  path.regimes.states.push_back(init_regime);
  path.values.push_back(init_x);

  SimulationState state(spec, seed);
  Regime regime = init_regime;
  double x = init_x;
  for (std::size_t t = 1; t < n; ++t) {
    StepResult next;
    try {
      next = step(spec, regime, x, state);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::non_finite_value) throw;
      path.diverged = true;
      path.diverged_at = t;
      break;
    }
    if (std::abs(next.x) > kDivergenceThreshold) {
      path.diverged = true;
      path.diverged_at = t;
      break;
    }
    regime = next.regime;
    x = next.x;
    path.regimes.states.push_back(regime);
    path.values.push_back(x);
  }
  return path;
}

Ensemble simulate_ensemble(const ModelSpec& spec, Regime init_regime, double init_x, std::size_t n,
                           std::size_t replications, std::uint64_t master_seed, std::size_t threads) {
  if (replications == 0) throw Error(ErrorCode::invalid_parameter, "ensemble needs at least one replication");
  Ensemble ensemble;
  ensemble.master_seed = master_seed;
  ensemble.seeds.resize(replications);
  for (std::size_t r = 0; r < replications; ++r) ensemble.seeds[r] = replication_seed(master_seed, r);
  ensemble.paths.resize(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    ensemble.paths[r] = simulate_path(spec, init_regime, init_x, n, ensemble.seeds[r]);
  });
  return ensemble;
}

}  // namespace svcharme
