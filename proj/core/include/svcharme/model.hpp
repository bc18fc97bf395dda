#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "svcharme/innovation.hpp"
#include "svcharme/markov_core.hpp"

namespace svcharme {

/// Floors applied to sigma_k(x) and A_k(x) at evaluation time.
inline constexpr double kVolatilityFloor = 1e-12;
inline constexpr double kSkewFloor = 1e-12;

enum class FunctionFamily { constant, affine, saturating };

[[nodiscard]] const char* to_string(FunctionFamily family) noexcept;

/// One scalar regime function of a real argument.
///
/// - constant:   f(z) = value
/// - affine:     f(z) = intercept + slope * z
/// - saturating: f(z) = offset + scale * tanh(z / scale)
///
/// The mean function receives z = x; volatility and skew receive z = |x|.
class RegimeFunction {
 public:
  [[nodiscard]] static RegimeFunction constant(double value) {
    return RegimeFunction(FunctionFamily::constant, value, 0.0);
  }
  [[nodiscard]] static RegimeFunction affine(double intercept, double slope) {
    return RegimeFunction(FunctionFamily::affine, intercept, slope);
  }
  [[nodiscard]] static RegimeFunction saturating(double scale, double offset) {
    return RegimeFunction(FunctionFamily::saturating, offset, scale);
  }

  [[nodiscard]] double operator()(double z) const noexcept;
  /// lim f(z)/z as z -> +inf.
  [[nodiscard]] double asymptotic_slope() const noexcept {
    return family_ == FunctionFamily::affine ? second_ : 0.0;
  }
  /// inf of f over z >= 0.
  [[nodiscard]] double lower_bound_on_half_line() const noexcept;

  [[nodiscard]] FunctionFamily family() const noexcept { return family_; }
  /// constant: value; affine: intercept; saturating: offset.
  [[nodiscard]] double first() const noexcept { return first_; }
  /// affine: slope; saturating: scale; constant: 0.
  [[nodiscard]] double second() const noexcept { return second_; }

  friend bool operator==(const RegimeFunction&, const RegimeFunction&) = default;

 private:
  RegimeFunction(FunctionFamily family, double first, double second)
      : family_(family), first_(first), second_(second) {}

  FunctionFamily family_;
  double first_;
  double second_;
};

/// The (m_k, sigma_k, A_k) triple of one regime.
struct RegimeFunctions {
  RegimeFunction mean = RegimeFunction::constant(0.0);
  RegimeFunction volatility = RegimeFunction::constant(1.0);
  RegimeFunction skew = RegimeFunction::constant(1.0);
};

struct RegimeValues {
  double mean = 0.0;
  double volatility = 1.0;
  double skew = 1.0;
};

/// Full model: hidden chain, per-regime functions, and the two innovation
/// laws. Immutable once created.
class ModelSpec {
 public:
  /// Validates positivity of volatility and skew functions and the regime
  /// count. Throws Error(invalid_parameter) or Error(regime_out_of_range).
  /// The skew innovation's fourth moment is computed here by quadrature; a
  /// missing fourth moment is recorded, not thrown.
  [[nodiscard]] static ModelSpec create(TransitionMatrix tm, std::vector<RegimeFunctions> regimes,
                                        InnovationSpec eps, InnovationSpec iota);

  [[nodiscard]] std::size_t size() const noexcept { return tm_.size(); }
  [[nodiscard]] const TransitionMatrix& transition() const noexcept { return tm_; }
  [[nodiscard]] const std::vector<RegimeFunctions>& regimes() const noexcept { return regimes_; }
  [[nodiscard]] const RegimeFunctions& regime(Regime k) const;
  [[nodiscard]] const InnovationSpec& eps() const noexcept { return eps_; }
  [[nodiscard]] const InnovationSpec& iota() const noexcept { return iota_; }

  [[nodiscard]] bool has_kappa() const noexcept { return kappa_.has_value(); }
  /// E[iota^4] by quadrature. Throws FourthMomentUndefined if absent.
  [[nodiscard]] double kappa() const;

  /// True when every function is constant or affine, so the drift limsup has
  /// a closed form.
  [[nodiscard]] bool is_affine_family() const noexcept;

  /// Same functions and innovations with every mean slope multiplied by
  /// `factor`. Used for monotonicity studies.
  [[nodiscard]] ModelSpec with_scaled_mean_slopes(double factor) const;

 private:
  ModelSpec(TransitionMatrix tm, std::vector<RegimeFunctions> regimes, InnovationSpec eps, InnovationSpec iota,
            std::optional<double> kappa)
      : tm_(std::move(tm)), regimes_(std::move(regimes)), eps_(eps), iota_(iota), kappa_(kappa) {}

  TransitionMatrix tm_;
  std::vector<RegimeFunctions> regimes_;
  InnovationSpec eps_;
  InnovationSpec iota_;
  std::optional<double> kappa_;
};

/// (m_k(x), sigma_k(x), A_k(x)) with the positivity floors applied.
/// Throws Error(regime_out_of_range).
[[nodiscard]] RegimeValues eval_regime(const ModelSpec& spec, Regime k, double x);

/// m^2 + sigma^2 + kappa A^2 + 2 m A, i.e. E[(m + sigma eps + A iota^2)^2].
[[nodiscard]] constexpr double drift_summand(const RegimeValues& v, double kappa) noexcept {
  return v.mean * v.mean + v.volatility * v.volatility + kappa * v.skew * v.skew + 2.0 * v.mean * v.skew;
}

[[nodiscard]] double drift_summand(const ModelSpec& spec, Regime k, double x);

/// sum_k a_ik drift_summand(k, x), the second moment of the next value.
[[nodiscard]] double drift_numerator(const ModelSpec& spec, Regime i, double x);

/// drift_numerator / x^2. Throws Error(zero_x) for x = 0.
[[nodiscard]] double drift_ratio(const ModelSpec& spec, Regime i, double x);

/// Expanding set of positive magnitudes |x|; both signs are evaluated.
struct MagnitudeGrid {
  std::vector<double> magnitudes;

  /// 10^lo, 10^(lo + 1/per_decade), ..., 10^hi.
  [[nodiscard]] static MagnitudeGrid decades(double lo_exponent, double hi_exponent, int per_decade);
  /// The default check grid, 10^1 .. 10^4 at four points per decade.
  [[nodiscard]] static MagnitudeGrid standard() { return decades(1.0, 4.0, 4); }
};

struct DriftRow {
  double x = 0.0;
  /// drift_ratio for each conditioning regime i = 1..K.
  std::vector<double> ratios;
};

struct DriftReport {
  std::vector<double> per_regime_limsup;
  double max_limsup = 0.0;
  std::optional<std::vector<double>> analytic_limsup;
  std::optional<double> analytic_max_limsup;
  /// Grid and closed form agree within 2% (true when no closed form exists).
  bool analytic_agrees = true;
  std::vector<double> grid;
  std::vector<DriftRow> rows;
  double margin = 0.01;
  bool pass = false;
  std::optional<double> L;
  std::optional<double> beta;
};

inline constexpr double kDriftMargin = 0.01;
inline constexpr double kAnalyticAgreement = 0.02;

/// Closed-form lim sup of drift_ratio for conditioning regime i, maximized
/// over the two signs of x. Requires is_affine_family().
[[nodiscard]] double analytic_limsup(const ModelSpec& spec, Regime i);

/// Relative agreement used between grid and closed-form limsup values. A
/// zero closed form is compared against a floor of 1e-2.
[[nodiscard]] bool limsup_agrees(double grid_value, double analytic_value, double tolerance = kAnalyticAgreement);

/// Estimates each regime's limsup as the max of drift_ratio over the largest
/// decade of the grid (both signs). Throws Error(grid_too_small) for fewer
/// than 8 magnitudes or fewer than 3 decades.
[[nodiscard]] DriftReport check_assumption8(const ModelSpec& spec, const MagnitudeGrid& grid = MagnitudeGrid::standard(),
                                            double margin = kDriftMargin);

}  // namespace svcharme
