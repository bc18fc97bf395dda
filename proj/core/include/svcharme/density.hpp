#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "svcharme/model.hpp"
#include "svcharme/quadrature.hpp"

namespace svcharme {

/// Density of m_k(x) + sigma_k(x) eps at y.
[[nodiscard]] double fbar(const ModelSpec& spec, Regime k, double x, double y);

/// Density of A_k(x) iota^2 at y:
/// [g(sqrt(y/A)) + g(-sqrt(y/A))] / (2 sqrt(A y)) for y > 0, else 0.
[[nodiscard]] double gbar(const ModelSpec& spec, Regime k, double x, double y);

/// Conditional density of X_t at u given X_{t-1} = x and Q_t = k: the
/// convolution of fbar and gbar. Computed in the variable s = sqrt(v / A),
/// where the inverse square-root singularity of gbar disappears:
///   integral over s >= 0 of fbar(u - A s^2) [g(s) + g(-s)] ds.
/// Throws QuadratureNonConvergence.
[[nodiscard]] double transition_density(const ModelSpec& spec, Regime k, double x, double u,
                                        const QuadratureSpec& quad = {});

/// Integral of transition_density over u in R. Should be 1.
[[nodiscard]] double transition_normalization(const ModelSpec& spec, Regime k, double x,
                                              const QuadratureSpec& quad = {});

/// P(X_t in [lo, hi] | X_{t-1} = x, Q_t = k), integrating the innovation CDF
/// against the skew law.
[[nodiscard]] double one_step_probability(const ModelSpec& spec, Regime k, double x, double lo, double hi,
                                          const QuadratureSpec& quad = {});

/// Conditional density of X_3 at u given X_1 = x, Q_1 = l, Q_3 = k:
///   sum_j a_lj a_jk int p_j(x, y) p_k(y, u) dy / sum_j a_lj a_jk.
/// Returns 0 when regime k is unreachable from l in two steps.
[[nodiscard]] double two_step_density(const ModelSpec& spec, Regime l, Regime k, double x, double u,
                                      const QuadratureSpec& quad = {});

/// Probability of {Q_{1+t} = k, X_{1+t} in [lo, hi]} from (Q_1 = l, X_1 = x)
/// for t in {1, 2}.
[[nodiscard]] double t_step_probability(const ModelSpec& spec, Regime l, Regime k, double x, double lo,
                                        double hi, int steps, const QuadratureSpec& quad = {});

struct SmallSetQuery {
  Regime from;
  Regime to;
  /// B = [-radius, radius].
  double radius = 2.0;
  /// Target interval for X.
  double target_lo = -1.0;
  double target_hi = 1.0;
  int steps = 1;
  std::size_t grid_points = 41;
};

struct SmallSetReport {
  SmallSetQuery query;
  double minimum = 0.0;
  double argmin = 0.0;
  bool pass = false;
  /// Set with warning "DegenerateTarget" for a zero-length target.
  std::vector<std::string> warnings;
  std::vector<double> xs;
  std::vector<double> probabilities;
};

/// Minimum of t_step_probability over an even grid of x in B. The proof
/// needs the infimum positive: pass iff minimum > 0.
/// Throws Error(invalid_parameter) for radius <= 0, an inverted target, or
/// steps outside {1, 2}; QuadratureNonConvergence from the kernels.
[[nodiscard]] SmallSetReport small_set_lower_bound(const ModelSpec& spec, const SmallSetQuery& query,
                                                   const QuadratureSpec& quad = {}, std::size_t threads = 1);

struct DensityCurve {
  Regime regime;
  double x = 0.0;
  double normalization = 0.0;
  std::vector<double> u;
  std::vector<double> density;
  std::vector<double> fbar;
};

[[nodiscard]] DensityCurve density_curve(const ModelSpec& spec, Regime k, double x, const std::vector<double>& u_grid,
                                         const QuadratureSpec& quad = {}, std::size_t threads = 1);

}  // namespace svcharme
