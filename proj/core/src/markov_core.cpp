#include "svcharme/markov_core.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <queue>

#include "svcharme/errors.hpp"

namespace svcharme {

TransitionMatrix TransitionMatrix::validate(const std::vector<std::vector<double>>& raw) {
  const std::size_t k = raw.size();
  if (k == 0) throw Error(ErrorCode::not_square, "transition matrix is empty");
  std::vector<double> entries;
  entries.reserve(k * k);
  for (std::size_t i = 0; i < k; ++i) {
    if (raw[i].size() != k) {
      throw Error(ErrorCode::not_square, "row " + std::to_string(i) + " has " +
                                             std::to_string(raw[i].size()) + " entries, expected " +
                                             std::to_string(k));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double a = raw[i][j];
      if (!std::isfinite(a)) throw NonStochasticRow(i, a);
      if (a < 0.0) throw NegativeEntry(i, j);
      sum += a;
      entries.push_back(a);
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) throw NonStochasticRow(i, sum);
  }
  return TransitionMatrix(k, std::move(entries));
}

std::vector<std::vector<double>> TransitionMatrix::rows() const {
  std::vector<std::vector<double>> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i].assign(row(i).begin(), row(i).end());
  return out;
}

Regime sample_regime(std::span<const double> probabilities, Engine& engine) {
  const double u = uniform01(engine);
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t j = 0; j < probabilities.size(); ++j) {
    if (probabilities[j] <= 0.0) continue;
    cumulative += probabilities[j];
    last_positive = j;
    if (u < cumulative) return Regime(j + 1);
  }
  // u landed in the rounding gap between the cumulative sum and 1.
  return Regime(last_positive + 1);
}

Regime TransitionMatrix::sample_next(Regime from, Engine& engine) const {
  return sample_regime(row(from.index()), engine);
}

double StationaryDistribution::balance_residual(const TransitionMatrix& tm) const {
  double worst = 0.0;
  for (std::size_t j = 0; j < tm.size(); ++j) {
    double flow = 0.0;
    for (std::size_t i = 0; i < tm.size(); ++i) flow += probabilities[i] * tm(i, j);
    worst = std::max(worst, std::abs(flow - probabilities[j]));
  }
  return worst;
}

namespace {

std::vector<bool> reachable_from_first(const TransitionMatrix& tm, bool reversed) {
  const std::size_t k = tm.size();
  std::vector<bool> seen(k, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (std::size_t j = 0; j < k; ++j) {
      const double a = reversed ? tm(j, i) : tm(i, j);
      if (a > 0.0 && !seen[j]) {
        seen[j] = true;
        frontier.push(j);
      }
    }
  }
  return seen;
}

void require_ergodic(const TransitionMatrix& tm) {
  if (!is_irreducible(tm)) throw Error(ErrorCode::reducible_chain, "hidden chain is reducible");
  const std::size_t d = period(tm);
  if (d != 1) throw Error(ErrorCode::periodic_chain, "hidden chain has period " + std::to_string(d));
}

}  // namespace

bool is_irreducible(const TransitionMatrix& tm) {
  const auto forward = reachable_from_first(tm, false);
  const auto backward = reachable_from_first(tm, true);
  for (std::size_t i = 0; i < tm.size(); ++i) {
    if (!forward[i] || !backward[i]) return false;
  }
  return true;
}

std::size_t period(const TransitionMatrix& tm) {
  if (!is_irreducible(tm)) throw Error(ErrorCode::reducible_chain, "period is undefined for a reducible chain");
  // BFS levels from state 1; every edge i -> j closes a walk of length
  // level[i] + 1 - level[j] modulo the period.
  const std::size_t k = tm.size();
  std::vector<long> level(k, -1);
  std::queue<std::size_t> frontier;
  level[0] = 0;
  frontier.push(0);
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (std::size_t j = 0; j < k; ++j) {
      if (tm(i, j) > 0.0 && level[j] < 0) {
        level[j] = level[i] + 1;
        frontier.push(j);
      }
    }
  }
  long g = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (tm(i, j) > 0.0) g = std::gcd(g, std::abs(level[i] + 1 - level[j]));
    }
  }
  return static_cast<std::size_t>(g);
}

StationaryDistribution stationary_distribution(const TransitionMatrix& tm) {
  require_ergodic(tm);
  const auto k = static_cast<Eigen::Index>(tm.size());
  // (A^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd system(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      system(i, j) = tm(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) - (i == j ? 1.0 : 0.0);
    }
  }
  system.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;
  const Eigen::VectorXd pi = system.fullPivLu().solve(rhs);

  StationaryDistribution out;
  out.probabilities.resize(tm.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < k; ++i) {
    out.probabilities[static_cast<std::size_t>(i)] = std::max(0.0, pi(i));
    total += out.probabilities[static_cast<std::size_t>(i)];
  }
  for (double& p : out.probabilities) p /= total;
  return out;
}

StationaryDistribution stationary_distribution_power(const TransitionMatrix& tm, std::size_t max_iterations,
                                                     double tolerance) {
  require_ergodic(tm);
  const std::size_t k = tm.size();
  std::vector<double> current(k, 1.0 / static_cast<double>(k));
  std::vector<double> next(k);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) next[j] += current[i] * tm(i, j);
    }
    double change = 0.0;
    for (std::size_t j = 0; j < k; ++j) change = std::max(change, std::abs(next[j] - current[j]));
    current.swap(next);
    if (change < tolerance) break;
  }
  const double total = std::accumulate(current.begin(), current.end(), 0.0);
  for (double& p : current) p /= total;
  return StationaryDistribution{std::move(current)};
}

RegimeSequence sample_chain(const TransitionMatrix& tm, Regime init, std::size_t n, std::uint64_t seed) {
  if (init.label() < 1 || init.label() > tm.size()) {
    throw Error(ErrorCode::invalid_init, "initial regime " + std::to_string(init.label()) +
                                             " outside 1.." + std::to_string(tm.size()));
  }
  if (n == 0) throw Error(ErrorCode::invalid_init, "sequence length must be at least 1");
  RegimeSequence seq;
  seq.seed = seed;
  seq.states.reserve(n);
  seq.states.push_back(init);
  Engine engine(derive_seed(seed, 0));
  for (std::size_t t = 1; t < n; ++t) seq.states.push_back(tm.sample_next(seq.states.back(), engine));
  return seq;
}

std::vector<double> empirical_frequencies(const RegimeSequence& seq, std::size_t k) {
  std::vector<double> freq(k, 0.0);
  for (const Regime r : seq.states) freq[r.index()] += 1.0;
  for (double& f : freq) f /= static_cast<double>(seq.states.size());
  return freq;
}

}  // namespace svcharme
