#include <gtest/gtest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "svcharme/errors.hpp"
#include "svcharme/innovation.hpp"
#include "svcharme/quadrature.hpp"

using namespace svcharme;

namespace {

std::vector<InnovationSpec> families() {
  return {InnovationSpec::standard_normal(), InnovationSpec::student_t(6.0), InnovationSpec::student_t(4.5),
          InnovationSpec::student_t(30.0), InnovationSpec::laplace()};
}

}  // namespace

TEST(Innovation, MomentsMatchClosedForms) {
  for (const InnovationSpec& inn : families()) {
    const InnovationMoments m = innovation_moments(inn);
    EXPECT_NEAR(m.mean, 0.0, 1e-8) << to_string(inn.family()) << " " << inn.dof();
    EXPECT_NEAR(m.variance, 1.0, 1e-8) << to_string(inn.family()) << " " << inn.dof();
    EXPECT_NEAR(m.kappa, inn.closed_form_fourth_moment(), 1e-6) << to_string(inn.family()) << " " << inn.dof();
  }
}

TEST(Innovation, SpecKappaValues) {
  EXPECT_NEAR(innovation_moments(InnovationSpec::standard_normal()).kappa, 3.0, 1e-6);
  EXPECT_NEAR(innovation_moments(InnovationSpec::student_t(6.0)).kappa, 6.0, 1e-6);
  EXPECT_NEAR(innovation_moments(InnovationSpec::laplace()).kappa, 6.0, 1e-6);
}

TEST(Innovation, FourthMomentUndefinedAtOrBelowFourDof) {
  for (const double dof : {4.0, 3.0, 2.5}) {
    try {
      (void)innovation_moments(InnovationSpec::student_t(dof));
      FAIL() << dof;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::fourth_moment_undefined);
    }
    const InnovationMoments mv = innovation_mean_variance(InnovationSpec::student_t(dof), {});
    EXPECT_NEAR(mv.variance, 1.0, 1e-6) << dof;
  }
  EXPECT_THROW((void)InnovationSpec::student_t(2.0), Error);
  EXPECT_THROW((void)InnovationSpec::student_t(-1.0), Error);
}

TEST(Innovation, PdfMatchesReferenceDistributions) {
  const boost::math::normal_distribution<double> normal;
  const double nu = 6.0;
  const double s = std::sqrt((nu - 2.0) / nu);
  const boost::math::students_t_distribution<double> t(nu);
  for (double x = -8.0; x <= 8.0; x += 0.37) {
    EXPECT_NEAR(InnovationSpec::standard_normal().pdf(x), boost::math::pdf(normal, x), 1e-15);
    EXPECT_NEAR(InnovationSpec::student_t(nu).pdf(x), boost::math::pdf(t, x / s) / s, 1e-14);
    EXPECT_NEAR(InnovationSpec::laplace().pdf(x), std::exp(-std::sqrt(2.0) * std::abs(x)) / std::sqrt(2.0), 1e-15);
  }
}

TEST(Innovation, DensitiesArePositiveEverywhere) {
  for (const InnovationSpec& inn : families()) {
    for (const double x : {-30.0, -5.0, 0.0, 5.0, 30.0}) EXPECT_GT(inn.pdf(x), 0.0);
  }
}

TEST(Innovation, CdfIsIntegralOfPdf) {
  for (const InnovationSpec& inn : families()) {
    for (const double x : {-2.0, -0.3, 0.0, 1.7}) {
      const double area = integrate([&](double y) { return inn.pdf(y); }, -std::numeric_limits<double>::infinity(), x,
                                    QuadratureSpec{})
                              .value;
      EXPECT_NEAR(inn.cdf(x), area, 1e-9);
    }
  }
}

TEST(Innovation, SamplersAreStandardized) {
  for (const InnovationSpec& inn : {InnovationSpec::standard_normal(), InnovationSpec::student_t(8.0),
                                    InnovationSpec::laplace()}) {
    Engine engine(11);
    InnovationSampler sampler(inn);
    const int n = 1'000'000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = sampler(engine);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    EXPECT_NEAR(mean, 0.0, 5.0 / std::sqrt(n)) << to_string(inn.family());
    // Var of x^2 is kappa - 1; kappa <= 6 here.
    EXPECT_NEAR(var, 1.0, 5.0 * std::sqrt(5.0 / n)) << to_string(inn.family());
  }
}

TEST(Quadrature, GaussianIntegralOverBreakpoints) {
  const double cuts[] = {-std::numeric_limits<double>::infinity(), -1.0, 0.0, 2.0,
                         std::numeric_limits<double>::infinity()};
  const QuadratureResult r = integrate([](double x) { return std::exp(-0.5 * x * x); }, std::span<const double>(cuts),
                                       QuadratureSpec{});
  EXPECT_NEAR(r.value, std::sqrt(2.0 * 3.14159265358979323846), 1e-12);
  EXPECT_TRUE(r.converged(QuadratureSpec{}));
}

TEST(Quadrature, NearZeroIntegrandMeetsAbsoluteTolerance) {
  const QuadratureResult r = integrate([](double x) { return 1e-300 * std::exp(-x); }, 0.0,
                                       std::numeric_limits<double>::infinity(), QuadratureSpec{});
  EXPECT_NEAR(r.value, 1e-300, 1e-8 * 1e-300);
  EXPECT_LT(r.error, 1e-12);
}

TEST(Quadrature, NonConvergenceIsReported) {
  QuadratureSpec spec;
  spec.max_subdivisions = 4;
  spec.relative_tolerance = 1e-14;
  spec.absolute_tolerance = 0.0;
  try {
    (void)integrate([](double x) { return std::sin(1.0 / x) / std::sqrt(x); }, 1e-9, 1.0, spec);
    FAIL();
  } catch (const QuadratureNonConvergence& e) {
    EXPECT_EQ(e.code(), ErrorCode::quadrature_non_convergence);
    EXPECT_GT(e.error_bound(), 0.0);
  }
}
