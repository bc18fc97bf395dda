#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "svcharme/model.hpp"
#include "svcharme/rng.hpp"

namespace svcharme {

/// |x| beyond which a trajectory is declared diverged and truncated.
inline constexpr double kDivergenceThreshold = 1e12;

/// Random state of one trajectory: the three engines plus the stateful
/// innovation samplers bound to their engines.
class SimulationState {
 public:
  SimulationState(const ModelSpec& spec, std::uint64_t seed);

  [[nodiscard]] Regime next_regime(const TransitionMatrix& tm, Regime from) { return tm.sample_next(from, streams_.regime); }
  [[nodiscard]] double draw_eps() { return eps_sampler_(streams_.eps); }
  [[nodiscard]] double draw_iota() { return iota_sampler_(streams_.iota); }

 private:
  StreamSet streams_;
  InnovationSampler eps_sampler_;
  InnovationSampler iota_sampler_;
};

struct StepResult {
  Regime regime;
  double x = 0.0;
};

/// One transition Z_{t-1} -> Z_t: draws Q_t from row prev_regime, then
/// x = m_k(prev_x) + sigma_k(prev_x) eps + A_k(prev_x) iota^2.
/// Throws Error(non_finite_value) on overflow.
[[nodiscard]] StepResult step(const ModelSpec& spec, Regime prev_regime, double prev_x, SimulationState& state);

/// Same as step with the regime already drawn; used by oracles that condition
/// on Q_t.
[[nodiscard]] double step_value(const ModelSpec& spec, Regime regime, double prev_x, SimulationState& state);

struct Path {
  RegimeSequence regimes;
  std::vector<double> values;
  Regime init_regime;
  double init_x = 0.0;
  std::uint64_t seed = 0;
  std::size_t requested_length = 0;
  bool diverged = false;
  /// Time index of the first value that crossed the threshold.
  std::optional<std::size_t> diverged_at;

  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// Path of length n with values[0] = init_x. Deterministic in its arguments.
/// A diverging run is truncated before the offending value and flagged.
/// Throws Error(invalid_init).
[[nodiscard]] Path simulate_path(const ModelSpec& spec, Regime init_regime, double init_x, std::size_t n,
                                 std::uint64_t seed);

/// Child index of a replication seed that feeds initial-state draws.
inline constexpr std::uint64_t kInitialStateStream = 3;

/// Q_1 drawn from pi with an engine seeded by derive_seed(seed, kInitialStateStream).
[[nodiscard]] Regime stationary_initial_regime(const std::vector<double>& pi, std::uint64_t seed);

struct Ensemble {
  std::vector<Path> paths;
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 0;
};

/// Seed of replication r under `master_seed`.
[[nodiscard]] constexpr std::uint64_t replication_seed(std::uint64_t master_seed, std::size_t r) noexcept {
  return derive_seed(master_seed, r);
}

/// R independent paths; path r equals simulate_path with replication_seed(r),
/// for any thread count.
[[nodiscard]] Ensemble simulate_ensemble(const ModelSpec& spec, Regime init_regime, double init_x, std::size_t n,
                                         std::size_t replications, std::uint64_t master_seed,
                                         std::size_t threads = 1);

}  // namespace svcharme
