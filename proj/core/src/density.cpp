#include "svcharme/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svcharme/errors.hpp"
#include "svcharme/parallel.hpp"

namespace svcharme {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Piecewise integration over [start, inf) (or R when start is -inf) with
/// interior cut points. Cuts keep narrow features from falling between the
/// nodes of a single wide panel.
template <typename F>
double integrate_pieces(F&& f, double start, std::vector<double> cuts, const QuadratureSpec& quad) {
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return !std::isfinite(c) || c <= start; }),
             cuts.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  cuts.insert(cuts.begin(), start);
  cuts.push_back(kInf);
  return integrate(f, std::span<const double>(cuts), quad).value;
}

/// Cut points in s = sqrt(v / A) around where A s^2 sits near `shift`
/// within a few volatility units, plus the bulk of a unit-scale skew law.
std::vector<double> skew_cuts(const RegimeValues& v, std::initializer_list<double> shifts) {
  std::vector<double> cuts{0.5, 1.0, 2.0, 4.0, 8.0};
  for (const double shift : shifts) {
    for (const double offset : {-12.0, -2.0, 0.0, 2.0, 12.0}) {
      const double level = shift + offset * v.volatility;
      if (level > 0.0) cuts.push_back(std::sqrt(level / v.skew));
    }
  }
  return cuts;
}

/// Cut points in y covering the law of m + sigma eps + A iota^2.
std::vector<double> value_cuts(const RegimeValues& v) {
  std::vector<double> cuts;
  for (const double offset : {-12.0, -2.0, 0.0, 2.0, 12.0}) cuts.push_back(v.mean + offset * v.volatility);
  for (const double q : {0.25, 1.0, 4.0, 16.0, 64.0}) cuts.push_back(v.mean + v.skew * q);
  return cuts;
}

double fbar_at(const InnovationSpec& f, const RegimeValues& v, double y) {
  return f.pdf((y - v.mean) / v.volatility) / v.volatility;
}

double transition_density_at(const ModelSpec& spec, const RegimeValues& v, double u, const QuadratureSpec& quad) {
  const InnovationSpec& f = spec.eps();
  const InnovationSpec& g = spec.iota();
  const auto integrand = [&](double s) {
    const double g_sym = g.pdf(s) + g.pdf(-s);
    if (g_sym == 0.0) return 0.0;
    return fbar_at(f, v, u - v.skew * s * s) * g_sym;
  };
  return integrate_pieces(integrand, 0.0, skew_cuts(v, {u - v.mean}), quad);
}

double one_step_probability_at(const ModelSpec& spec, const RegimeValues& v, double lo, double hi,
                               const QuadratureSpec& quad) {
  if (!(hi > lo)) return 0.0;
  const InnovationSpec& f = spec.eps();
  const InnovationSpec& g = spec.iota();
  const auto integrand = [&](double s) {
    const double g_sym = g.pdf(s) + g.pdf(-s);
    if (g_sym == 0.0) return 0.0;
    const double centre = v.mean + v.skew * s * s;
    // Upper-tail complement keeps precision when both bounds sit far right.
    const double a = (lo - centre) / v.volatility;
    const double b = (hi - centre) / v.volatility;
    const double mass = a > 0.0 ? (1.0 - f.cdf(a)) - (1.0 - f.cdf(b)) : f.cdf(b) - f.cdf(a);
    return std::max(0.0, mass) * g_sym;
  };
  return integrate_pieces(integrand, 0.0, skew_cuts(v, {lo - v.mean, hi - v.mean}), quad);
}

void require_regime(const ModelSpec& spec, Regime k) { (void)spec.regime(k); }

}  // namespace

double fbar(const ModelSpec& spec, Regime k, double x, double y) {
  return fbar_at(spec.eps(), eval_regime(spec, k, x), y);
}

double gbar(const ModelSpec& spec, Regime k, double x, double y) {
  const double a = eval_regime(spec, k, x).skew;
  if (!(y > 0.0)) return 0.0;
  const double root = std::sqrt(y / a);
  const InnovationSpec& g = spec.iota();
  return (g.pdf(root) + g.pdf(-root)) / (2.0 * std::sqrt(a * y));
}

double transition_density(const ModelSpec& spec, Regime k, double x, double u, const QuadratureSpec& quad) {
  return transition_density_at(spec, eval_regime(spec, k, x), u, quad);
}

double transition_normalization(const ModelSpec& spec, Regime k, double x, const QuadratureSpec& quad) {
  const RegimeValues v = eval_regime(spec, k, x);
  return integrate_pieces([&](double u) { return transition_density_at(spec, v, u, quad); }, -kInf, value_cuts(v),
                          quad);
}

double one_step_probability(const ModelSpec& spec, Regime k, double x, double lo, double hi,
                            const QuadratureSpec& quad) {
  return one_step_probability_at(spec, eval_regime(spec, k, x), lo, hi, quad);
}

double two_step_density(const ModelSpec& spec, Regime l, Regime k, double x, double u, const QuadratureSpec& quad) {
  require_regime(spec, l);
  require_regime(spec, k);
  const TransitionMatrix& tm = spec.transition();
  double weight = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < tm.size(); ++j) {
    const double w = tm(l.index(), j) * tm(j, k.index());
    if (w == 0.0) continue;
    const RegimeValues vj = eval_regime(spec, Regime(j + 1), x);
    const auto integrand = [&](double y) {
      const double first = transition_density_at(spec, vj, y, quad);
      if (first == 0.0) return 0.0;
      return first * transition_density_at(spec, eval_regime(spec, k, y), u, quad);
    };
    total += w * integrate_pieces(integrand, -kInf, value_cuts(vj), quad);
    weight += w;
  }
  return weight > 0.0 ? total / weight : 0.0;
}

double t_step_probability(const ModelSpec& spec, Regime l, Regime k, double x, double lo, double hi, int steps,
                          const QuadratureSpec& quad) {
  require_regime(spec, l);
  require_regime(spec, k);
  const TransitionMatrix& tm = spec.transition();
  if (!(hi > lo)) return 0.0;
  if (steps == 1) {
    const double a = tm(l.index(), k.index());
    return a == 0.0 ? 0.0 : a * one_step_probability(spec, k, x, lo, hi, quad);
  }
  if (steps != 2) throw Error(ErrorCode::invalid_parameter, "exact kernels are available for t = 1 and t = 2 only");
  double total = 0.0;
  for (std::size_t j = 0; j < tm.size(); ++j) {
    const double w = tm(l.index(), j) * tm(j, k.index());
    if (w == 0.0) continue;
    const RegimeValues vj = eval_regime(spec, Regime(j + 1), x);
    const auto integrand = [&](double y) {
      const double first = transition_density_at(spec, vj, y, quad);
      if (first == 0.0) return 0.0;
      return first * one_step_probability_at(spec, eval_regime(spec, k, y), lo, hi, quad);
    };
    total += w * integrate_pieces(integrand, -kInf, value_cuts(vj), quad);
  }
  return total;
}

SmallSetReport small_set_lower_bound(const ModelSpec& spec, const SmallSetQuery& query, const QuadratureSpec& quad,
                                     std::size_t threads) {
  if (!(query.radius > 0.0)) throw Error(ErrorCode::invalid_parameter, "small-set radius must be positive");
  if (!(query.target_hi >= query.target_lo)) throw Error(ErrorCode::invalid_parameter, "target interval is inverted");
  if (query.steps != 1 && query.steps != 2) {
    throw Error(ErrorCode::invalid_parameter, "small-set check supports t = 1 and t = 2");
  }
  if (query.grid_points < 2) throw Error(ErrorCode::invalid_parameter, "small-set grid needs at least 2 points");
  require_regime(spec, query.from);
  require_regime(spec, query.to);

  SmallSetReport report;
  report.query = query;
  const std::size_t n = query.grid_points;
  report.xs.resize(n);
  report.probabilities.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    report.xs[i] = -query.radius + 2.0 * query.radius * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (query.target_hi == query.target_lo) {
    report.warnings.emplace_back("DegenerateTarget");
  } else {
    parallel_for(n, threads, [&](std::size_t i) {
      report.probabilities[i] = t_step_probability(spec, query.from, query.to, report.xs[i], query.target_lo,
                                                   query.target_hi, query.steps, quad);
    });
  }
  const auto it = std::min_element(report.probabilities.begin(), report.probabilities.end());
  report.minimum = *it;
  report.argmin = report.xs[static_cast<std::size_t>(it - report.probabilities.begin())];
  report.pass = report.minimum > 0.0;
  return report;
}

DensityCurve density_curve(const ModelSpec& spec, Regime k, double x, const std::vector<double>& u_grid,
                           const QuadratureSpec& quad, std::size_t threads) {
  DensityCurve curve;
  curve.regime = k;
  curve.x = x;
  curve.u = u_grid;
  curve.density.assign(u_grid.size(), 0.0);
  curve.fbar.assign(u_grid.size(), 0.0);
  curve.normalization = transition_normalization(spec, k, x, quad);
  parallel_for(u_grid.size(), threads, [&](std::size_t i) {
    curve.density[i] = transition_density(spec, k, x, u_grid[i], quad);
    curve.fbar[i] = fbar(spec, k, x, u_grid[i]);
  });
  return curve;
}

}  // namespace svcharme
