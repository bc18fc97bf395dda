#include "svcharme/innovation.hpp"

#include <boost/math/distributions/laplace.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

namespace svcharme {

namespace {

constexpr double kLaplaceScale = 0.70710678118654752440;  // 1/sqrt(2)
constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr std::size_t kTanhSinhLevels = 15;

double student_scale(double dof) { return std::sqrt((dof - 2.0) / dof); }

/// Integral of x^power * pdf(x) over [0, inf). The tail [1, inf) is mapped to
/// (0, 1] by x = 1/w, where polynomial tails become endpoint singularities
/// that tanh-sinh resolves.
template <typename Pdf>
double half_line_moment(Pdf&& pdf, int power, const QuadratureSpec& quad) {
  const auto body = integrate([&](double x) { return std::pow(x, power) * pdf(x); }, 0.0, 1.0, quad);
  boost::math::quadrature::tanh_sinh<double> tail_rule(kTanhSinhLevels);
  double error = 0.0;
  double l1 = 0.0;
  const double tail = tail_rule.integrate(
      [&](double w) {
        const double x = 1.0 / w;
        const double density = std::isfinite(x) ? pdf(x) : 0.0;
        if (density == 0.0) return 0.0;
        const double value = std::pow(x, power + 2) * density;
        return std::isfinite(value) ? value : 0.0;
      },
      0.0, 1.0, quad.relative_tolerance, &error, &l1);
  if (!std::isfinite(tail) || error > std::max(quad.absolute_tolerance, quad.relative_tolerance * l1)) {
    throw QuadratureNonConvergence(tail, error);
  }
  return body.value + tail;
}

template <typename Pdf>
double raw_moment(Pdf&& pdf, int power, const QuadratureSpec& quad) {
  const double sign = power % 2 == 0 ? 1.0 : -1.0;
  return half_line_moment(pdf, power, quad) +
         sign * half_line_moment([&](double x) { return pdf(-x); }, power, quad);
}

}  // namespace

const char* to_string(InnovationFamily family) noexcept {
  switch (family) {
    case InnovationFamily::standard_normal: return "standard_normal";
    case InnovationFamily::student_t: return "student_t";
    case InnovationFamily::laplace: return "laplace";
  }
  return "unknown";
}

InnovationSpec InnovationSpec::student_t(double dof) {
  if (!(dof > 2.0) || !std::isfinite(dof)) {
    throw Error(ErrorCode::invalid_parameter, "Student-t degrees of freedom must exceed 2 to standardize");
  }
  return InnovationSpec(InnovationFamily::student_t, dof);
}

InnovationSpec::InnovationSpec(InnovationFamily family, double dof) : family_(family), dof_(dof) {
  if (family_ == InnovationFamily::student_t) {
    scale_ = student_scale(dof_);
    log_norm_ = std::lgamma(0.5 * (dof_ + 1.0)) - std::lgamma(0.5 * dof_) - 0.5 * std::log(dof_ * kPi) -
                std::log(scale_);
  }
}

double InnovationSpec::pdf(double x) const {
  switch (family_) {
    case InnovationFamily::standard_normal: return kInvSqrt2Pi * std::exp(-0.5 * x * x);
    case InnovationFamily::student_t: {
      const double t = x / scale_;
      return std::exp(log_norm_ - 0.5 * (dof_ + 1.0) * std::log1p(t * t / dof_));
    }
    case InnovationFamily::laplace: return std::exp(-std::abs(x) / kLaplaceScale) / (2.0 * kLaplaceScale);
  }
  return 0.0;
}

double InnovationSpec::cdf(double x) const {
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  switch (family_) {
    case InnovationFamily::standard_normal:
      return boost::math::cdf(boost::math::normal_distribution<double>(0.0, 1.0), x);
    case InnovationFamily::student_t:
      return boost::math::cdf(boost::math::students_t_distribution<double>(dof_), x / scale_);
    case InnovationFamily::laplace:
      return boost::math::cdf(boost::math::laplace_distribution<double>(0.0, kLaplaceScale), x);
  }
  return 0.0;
}

double InnovationSpec::closed_form_fourth_moment() const noexcept {
  switch (family_) {
    case InnovationFamily::standard_normal: return 3.0;
    case InnovationFamily::student_t:
      return dof_ > 4.0 ? 3.0 * (dof_ - 2.0) / (dof_ - 4.0) : std::numeric_limits<double>::infinity();
    case InnovationFamily::laplace: return 6.0;
  }
  return std::numeric_limits<double>::infinity();
}

InnovationMoments innovation_mean_variance(const InnovationSpec& inn, const QuadratureSpec& quad) {
  const auto pdf = [&](double x) { return inn.pdf(x); };
  InnovationMoments m;
  m.mean = raw_moment(pdf, 1, quad);
  m.variance = raw_moment(pdf, 2, quad) - m.mean * m.mean;
  return m;
}

InnovationMoments innovation_moments(const InnovationSpec& inn, const QuadratureSpec& quad) {
  if (inn.family() == InnovationFamily::student_t && inn.dof() <= 4.0) {
    throw Error(ErrorCode::fourth_moment_undefined,
                "Student-t with " + std::to_string(inn.dof()) + " degrees of freedom has no fourth moment");
  }
  InnovationMoments m = innovation_mean_variance(inn, quad);
  m.kappa = raw_moment([&](double x) { return inn.pdf(x); }, 4, quad);
  return m;
}

InnovationSampler::InnovationSampler(const InnovationSpec& spec) : family_(spec.family()) {
  if (family_ == InnovationFamily::student_t) {
    student_ = std::student_t_distribution<double>(spec.dof());
    scale_ = student_scale(spec.dof());
  }
}

double InnovationSampler::operator()(Engine& engine) {
  switch (family_) {
    case InnovationFamily::standard_normal: return normal_(engine);
    case InnovationFamily::student_t: return scale_ * student_(engine);
    case InnovationFamily::laplace: {
      // Inverse CDF on the open interval (0, 1).
      const double u = (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53 - 0.5;
      const double magnitude = -kLaplaceScale * std::log1p(-2.0 * std::abs(u));
      return u < 0.0 ? -magnitude : magnitude;
    }
  }
  return 0.0;
}

}  // namespace svcharme
