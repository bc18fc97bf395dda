#pragma once

#include <random>

#include "svcharme/quadrature.hpp"
#include "svcharme/rng.hpp"

namespace svcharme {

enum class InnovationFamily { standard_normal, student_t, laplace };

/// Zero-mean, unit-variance innovation law with an everywhere positive
/// continuous density.
class InnovationSpec {
 public:
  [[nodiscard]] static InnovationSpec standard_normal() { return InnovationSpec(InnovationFamily::standard_normal, 0.0); }
  /// Student-t with `dof` degrees of freedom, rescaled by sqrt((dof-2)/dof).
  /// Requires dof > 2; the fourth moment additionally needs dof > 4.
  [[nodiscard]] static InnovationSpec student_t(double dof);
  /// Laplace with scale 1/sqrt(2).
  [[nodiscard]] static InnovationSpec laplace() { return InnovationSpec(InnovationFamily::laplace, 0.0); }

  [[nodiscard]] InnovationFamily family() const noexcept { return family_; }
  [[nodiscard]] double dof() const noexcept { return dof_; }

  [[nodiscard]] double pdf(double x) const;
  [[nodiscard]] double cdf(double x) const;
  /// Closed-form E[X^4]; +inf when it does not exist.
  [[nodiscard]] double closed_form_fourth_moment() const noexcept;

  friend bool operator==(const InnovationSpec& a, const InnovationSpec& b) noexcept {
    return a.family_ == b.family_ && a.dof_ == b.dof_;
  }

 private:
  InnovationSpec(InnovationFamily family, double dof);

  InnovationFamily family_;
  double dof_;
  // Student-t: sqrt((dof - 2) / dof) and the log normalizer of the rescaled
  // density.
  double scale_ = 1.0;
  double log_norm_ = 0.0;
};

[[nodiscard]] const char* to_string(InnovationFamily family) noexcept;

struct InnovationMoments {
  double mean = 0.0;
  double variance = 0.0;
  /// Raw fourth moment E[X^4].
  double kappa = 0.0;
};

/// Mean and variance by quadrature against the density; kappa left at 0.
[[nodiscard]] InnovationMoments innovation_mean_variance(const InnovationSpec& inn,
                                                         const QuadratureSpec& quad = {});

/// Mean, variance and E[X^4] by quadrature. Throws FourthMomentUndefined for
/// Student-t with dof <= 4.
[[nodiscard]] InnovationMoments innovation_moments(const InnovationSpec& inn, const QuadratureSpec& quad = {});

/// Stateful draw source for one innovation law on one engine.
class InnovationSampler {
 public:
  explicit InnovationSampler(const InnovationSpec& spec);
  double operator()(Engine& engine);

 private:
  InnovationFamily family_;
  double scale_ = 1.0;
  std::normal_distribution<double> normal_;
  std::student_t_distribution<double> student_;
};

}  // namespace svcharme
