#include "svcharme/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "svcharme/errors.hpp"

namespace svcharme {

const char* to_string(FunctionFamily family) noexcept {
  switch (family) {
    case FunctionFamily::constant: return "constant";
    case FunctionFamily::affine: return "affine";
    case FunctionFamily::saturating: return "saturating";
  }
  return "unknown";
}

double RegimeFunction::operator()(double z) const noexcept {
  switch (family_) {
    case FunctionFamily::constant: return first_;
    case FunctionFamily::affine: return first_ + second_ * z;
    case FunctionFamily::saturating: return first_ + second_ * std::tanh(z / second_);
  }
  return 0.0;
}

double RegimeFunction::lower_bound_on_half_line() const noexcept {
  switch (family_) {
    case FunctionFamily::constant: return first_;
    case FunctionFamily::affine:
      return second_ >= 0.0 ? first_ : -std::numeric_limits<double>::infinity();
    case FunctionFamily::saturating: return first_;  // tanh(z / scale) >= 0 for z >= 0, scale > 0
  }
  return 0.0;
}

namespace {

void validate_function(const RegimeFunction& f, std::size_t k, const char* role, bool positive) {
  const std::string where = "regime " + std::to_string(k + 1) + " " + role;
  if (!std::isfinite(f.first()) || !std::isfinite(f.second())) {
    throw Error(ErrorCode::invalid_parameter, where + " has a non-finite parameter");
  }
  if (f.family() == FunctionFamily::saturating && !(f.second() > 0.0)) {
    throw Error(ErrorCode::invalid_parameter, where + " saturating scale must be positive");
  }
  if (positive) {
    if (f.family() == FunctionFamily::affine && f.second() < 0.0) {
      throw Error(ErrorCode::invalid_parameter, where + " slope must be nonnegative");
    }
    if (!(f.lower_bound_on_half_line() > 0.0)) {
      throw Error(ErrorCode::invalid_parameter, where + " must be strictly positive");
    }
  }
}

}  // namespace

ModelSpec ModelSpec::create(TransitionMatrix tm, std::vector<RegimeFunctions> regimes, InnovationSpec eps,
                            InnovationSpec iota) {
  if (regimes.size() != tm.size()) {
    throw Error(ErrorCode::regime_out_of_range, "expected " + std::to_string(tm.size()) +
                                                    " regime function triples, got " +
                                                    std::to_string(regimes.size()));
  }
  for (std::size_t k = 0; k < regimes.size(); ++k) {
    validate_function(regimes[k].mean, k, "mean", false);
    validate_function(regimes[k].volatility, k, "volatility", true);
    validate_function(regimes[k].skew, k, "skew", true);
  }
  std::optional<double> kappa;
  try {
    kappa = innovation_moments(iota).kappa;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::fourth_moment_undefined) throw;
  }
  return ModelSpec(std::move(tm), std::move(regimes), eps, iota, kappa);
}

const RegimeFunctions& ModelSpec::regime(Regime k) const {
  if (k.label() < 1 || k.label() > size()) {
    throw Error(ErrorCode::regime_out_of_range,
                "regime " + std::to_string(k.label()) + " outside 1.." + std::to_string(size()));
  }
  return regimes_[k.index()];
}

double ModelSpec::kappa() const {
  if (!kappa_) {
    throw Error(ErrorCode::fourth_moment_undefined, "skew innovation has no finite fourth moment");
  }
  return *kappa_;
}

bool ModelSpec::is_affine_family() const noexcept {
  const auto ok = [](const RegimeFunction& f) { return f.family() != FunctionFamily::saturating; };
  return std::all_of(regimes_.begin(), regimes_.end(),
                     [&](const RegimeFunctions& r) { return ok(r.mean) && ok(r.volatility) && ok(r.skew); });
}

ModelSpec ModelSpec::with_scaled_mean_slopes(double factor) const {
  auto scaled = regimes_;
  for (auto& r : scaled) {
    if (r.mean.family() == FunctionFamily::affine) {
      r.mean = RegimeFunction::affine(r.mean.first(), r.mean.second() * factor);
    }
  }
  return ModelSpec(tm_, std::move(scaled), eps_, iota_, kappa_);
}

RegimeValues eval_regime(const ModelSpec& spec, Regime k, double x) {
  const RegimeFunctions& f = spec.regime(k);
  const double magnitude = std::abs(x);
  return RegimeValues{f.mean(x), std::max(f.volatility(magnitude), kVolatilityFloor),
                      std::max(f.skew(magnitude), kSkewFloor)};
}

double drift_summand(const ModelSpec& spec, Regime k, double x) {
  return drift_summand(eval_regime(spec, k, x), spec.kappa());
}

double drift_numerator(const ModelSpec& spec, Regime i, double x) {
  const double kappa = spec.kappa();
  const TransitionMatrix& tm = spec.transition();
  if (i.label() < 1 || i.label() > tm.size()) {
    throw Error(ErrorCode::regime_out_of_range, "conditioning regime " + std::to_string(i.label()));
  }
  double total = 0.0;
  for (std::size_t k = 0; k < tm.size(); ++k) {
    const double a = tm(i.index(), k);
    if (a == 0.0) continue;
    total += a * drift_summand(eval_regime(spec, Regime(k + 1), x), kappa);
  }
  return total;
}

double drift_ratio(const ModelSpec& spec, Regime i, double x) {
  if (x == 0.0) throw Error(ErrorCode::zero_x, "drift ratio is undefined at x = 0");
  return drift_numerator(spec, i, x) / (x * x);
}

MagnitudeGrid MagnitudeGrid::decades(double lo_exponent, double hi_exponent, int per_decade) {
  MagnitudeGrid grid;
  if (per_decade < 1 || !(hi_exponent >= lo_exponent)) return grid;
  const auto steps = static_cast<int>(std::lround((hi_exponent - lo_exponent) * per_decade));
  for (int s = 0; s <= steps; ++s) {
    grid.magnitudes.push_back(std::pow(10.0, lo_exponent + static_cast<double>(s) / per_decade));
  }
  return grid;
}

double analytic_limsup(const ModelSpec& spec, Regime i) {
  const double kappa = spec.kappa();
  const TransitionMatrix& tm = spec.transition();
  double best = -std::numeric_limits<double>::infinity();
  for (const double sign : {-1.0, 1.0}) {
    double total = 0.0;
    for (std::size_t k = 0; k < tm.size(); ++k) {
      const RegimeFunctions& f = spec.regimes()[k];
      const double b = f.mean.asymptotic_slope();
      const double d = f.volatility.asymptotic_slope();
      const double t = f.skew.asymptotic_slope();
      total += tm(i.index(), k) * (b * b + d * d + kappa * t * t + 2.0 * b * t * sign);
    }
    best = std::max(best, total);
  }
  return best;
}

bool limsup_agrees(double grid_value, double analytic_value, double tolerance) {
  return std::abs(grid_value - analytic_value) <= tolerance * std::max(std::abs(analytic_value), 1e-2);
}

DriftReport check_assumption8(const ModelSpec& spec, const MagnitudeGrid& grid, double margin) {
  std::vector<double> magnitudes = grid.magnitudes;
  std::sort(magnitudes.begin(), magnitudes.end());
  magnitudes.erase(std::unique(magnitudes.begin(), magnitudes.end()), magnitudes.end());
  if (magnitudes.size() < 8 || !(magnitudes.front() > 0.0) ||
      std::log10(magnitudes.back() / magnitudes.front()) < 3.0 - 1e-9) {
    throw Error(ErrorCode::grid_too_small, "grid needs at least 8 positive magnitudes spanning 3 decades");
  }

  const std::size_t k = spec.size();
  DriftReport report;
  report.margin = margin;
  report.grid = magnitudes;
  report.per_regime_limsup.assign(k, -std::numeric_limits<double>::infinity());
  const double far_decade = magnitudes.back() / 10.0;

  for (const double magnitude : magnitudes) {
    for (const double x : {-magnitude, magnitude}) {
      DriftRow row{x, std::vector<double>(k)};
      for (std::size_t i = 0; i < k; ++i) {
        row.ratios[i] = drift_ratio(spec, Regime(i + 1), x);
        if (magnitude >= far_decade * (1.0 - 1e-12)) {
          report.per_regime_limsup[i] = std::max(report.per_regime_limsup[i], row.ratios[i]);
        }
      }
      report.rows.push_back(std::move(row));
    }
  }
  report.max_limsup = *std::max_element(report.per_regime_limsup.begin(), report.per_regime_limsup.end());
  report.pass = report.max_limsup < 1.0 - margin;

  if (spec.is_affine_family()) {
    std::vector<double> analytic(k);
    for (std::size_t i = 0; i < k; ++i) analytic[i] = analytic_limsup(spec, Regime(i + 1));
    report.analytic_max_limsup = *std::max_element(analytic.begin(), analytic.end());
    for (std::size_t i = 0; i < k; ++i) {
      report.analytic_agrees = report.analytic_agrees && limsup_agrees(report.per_regime_limsup[i], analytic[i]);
    }
    report.analytic_limsup = std::move(analytic);
  }
  return report;
}

}  // namespace svcharme
