#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "svcharme/rng.hpp"

namespace svcharme {

/// 1-based regime label in {1, ..., K}.
class Regime {
 public:
  constexpr Regime() = default;
  constexpr explicit Regime(std::size_t label) : label_(static_cast<std::uint32_t>(label)) {}

  [[nodiscard]] constexpr std::size_t label() const noexcept { return label_; }
  /// 0-based position for indexing matrices and vectors.
  [[nodiscard]] constexpr std::size_t index() const noexcept { return label_ - 1; }

  friend constexpr bool operator==(Regime, Regime) = default;

 private:
  std::uint32_t label_ = 1;
};

/// Validated K x K row-stochastic matrix of the hidden chain.
class TransitionMatrix {
 public:
  /// Row-sum tolerance. Rows are never renormalized.
  static constexpr double kRowSumTolerance = 1e-12;

  /// Throws NonStochasticRow, NegativeEntry, or Error(not_square).
  [[nodiscard]] static TransitionMatrix validate(const std::vector<std::vector<double>>& raw);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  /// Entry a_ij with 0-based indices.
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
    return entries_[i * size_ + j];
  }
  [[nodiscard]] double prob(Regime from, Regime to) const noexcept {
    return (*this)(from.index(), to.index());
  }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {entries_.data() + i * size_, size_};
  }
  [[nodiscard]] std::vector<std::vector<double>> rows() const;

  /// Regime drawn from row `from` using one uniform from `engine`.
  [[nodiscard]] Regime sample_next(Regime from, Engine& engine) const;

 private:
  TransitionMatrix(std::size_t size, std::vector<double> entries)
      : size_(size), entries_(std::move(entries)) {}

  std::size_t size_;
  std::vector<double> entries_;
};

/// Stationary law pi of the hidden chain, pi^T A = pi^T.
struct StationaryDistribution {
  std::vector<double> probabilities;

  /// max_k |(pi^T A)_k - pi_k|.
  [[nodiscard]] double balance_residual(const TransitionMatrix& tm) const;
};

struct RegimeSequence {
  std::vector<Regime> states;
  std::uint64_t seed = 0;
};

/// True iff the graph with edges i -> j for a_ij > 0 is strongly connected.
[[nodiscard]] bool is_irreducible(const TransitionMatrix& tm);

/// Period of an irreducible chain: gcd of cycle lengths through state 1.
/// Throws ReducibleChain.
[[nodiscard]] std::size_t period(const TransitionMatrix& tm);

/// Solves the balance equations directly. Throws ReducibleChain or
/// PeriodicChain.
[[nodiscard]] StationaryDistribution stationary_distribution(const TransitionMatrix& tm);

/// Power iteration from the uniform law; the independent route to pi.
[[nodiscard]] StationaryDistribution stationary_distribution_power(const TransitionMatrix& tm,
                                                                   std::size_t max_iterations = 1'000'000,
                                                                   double tolerance = 1e-15);

/// Draws one regime from a probability vector with one uniform from `engine`.
[[nodiscard]] Regime sample_regime(std::span<const double> probabilities, Engine& engine);

/// n states with states[0] = init. Pure function of its arguments.
/// Throws Error(invalid_init) for an out-of-range init or n = 0.
[[nodiscard]] RegimeSequence sample_chain(const TransitionMatrix& tm, Regime init, std::size_t n,
                                          std::uint64_t seed);

/// Fraction of time spent in each regime.
[[nodiscard]] std::vector<double> empirical_frequencies(const RegimeSequence& seq, std::size_t k);

}  // namespace svcharme
