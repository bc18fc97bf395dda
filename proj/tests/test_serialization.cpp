#include <gtest/gtest.h>

#include <charconv>

#include "support.hpp"
#include "svcharme/errors.hpp"

using namespace svcharme;
using namespace svcharme::testing;

namespace {

std::string config_error_location(const std::string& text) {
  try {
    (void)model_from_json(parse_json_text(text).at("model"));
  } catch (const ConfigError& e) {
    return e.location();
  }
  return "<none>";
}

const char* kModelPrefix = R"({"model": {"transition_matrix": [[1.0]], "regimes": [)";

}  // namespace

TEST(Serialization, ModelRoundTrip) {
  const ModelSpec spec = ModelSpec::create(
      TransitionMatrix::validate({{0.9, 0.1}, {0.2, 0.8}}),
      {RegimeFunctions{RegimeFunction::saturating(2.0, 0.5), RegimeFunction::affine(1.0, 0.1),
                       RegimeFunction::constant(0.3)},
       affine_regime(1.1)},
      InnovationSpec::student_t(5.0), InnovationSpec::laplace());
  const Json j = to_json(spec);
  const ModelSpec back = model_from_json(j);
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(back.eps(), spec.eps());
  EXPECT_EQ(back.iota(), spec.iota());
  EXPECT_EQ(back.regime(Regime(1)).mean, spec.regime(Regime(1)).mean);
  EXPECT_EQ(model_from_json(parse_json_text(j.dump())).transition().rows(), spec.transition().rows());
}

TEST(Serialization, ConfigErrorLocations) {
  EXPECT_EQ(config_error_location(R"({"model": {"regimes": []}})"), "/model/transition_matrix");
  EXPECT_EQ(config_error_location(std::string(kModelPrefix) +
                                  R"({"mean": {"family": "cubic"}, "volatility": {"family": "constant", "value": 1},
                                  "skew": {"family": "constant", "value": 0.1}}], "eps": {"family": "normal"},
                                  "iota": {"family": "normal"}}})"),
            "/model/regimes/0/mean/family");
  EXPECT_EQ(config_error_location(std::string(kModelPrefix) +
                                  R"({"mean": {"family": "constant", "value": 0}, "volatility": {"family": "constant", "value": 1},
                                  "skew": {"family": "constant", "value": 0.1}}], "eps": {"family": "student_t", "dof": 2},
                                  "iota": {"family": "normal"}}})"),
            "/model/eps/dof");
  EXPECT_EQ(config_error_location(R"({"model": {"transition_matrix": [[0.5, 0.6], [0.5, 0.5]], "regimes": [], "eps": {}, "iota": {}}})"),
            "/model/transition_matrix/0");
}

TEST(Serialization, SyntaxErrorsCarryLineAndColumn) {
  try {
    (void)parse_json_text("{\n  \"a\": [1, 2,\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(e.location().find("line 3"), std::string::npos) << e.location();
  }
}

TEST(Serialization, FormatDoubleRoundTrips) {
  for (const double v : {0.0, -0.0, 0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5}) {
    const std::string text = format_double(v);
    double back = 0.0;
    std::from_chars(text.data(), text.data() + text.size(), back);
    EXPECT_EQ(back, v) << text;
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(Serialization, PathCsvFormat) {
  const Path p = simulate_path(reference_spec(), Regime(2), 1.5, 3, 9);
  const std::string csv = path_csv(p);
  EXPECT_EQ(csv.rfind("t,regime,x\n1,2,1.5\n", 0), 0u) << csv;
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Serialization, DistanceAndMcseCsvHeaders) {
  ConvergenceReport r;
  r.lags = {0, 1};
  r.distances = {1.0, 0.5};
  r.informative = {true, true};
  r.mcse_table = {McseRow{100, 0.5, 0.01, 0.1}};
  EXPECT_EQ(distance_csv(r).rfind("lag,distance,informative\n0,1,", 0), 0u) << distance_csv(r);
  EXPECT_EQ(mcse_csv(r), "n,mean,mcse,mcse_sqrt_n\n100,0.5,0.01,0.1\n");
}

TEST(Serialization, DriftReportJson) {
  const DriftReport report = check_assumption8(reference_spec());
  const Json j = to_json(report);
  EXPECT_EQ(j.at("verdict"), "pass");
  EXPECT_EQ(j.at("per_regime_limsup").size(), 2u);
  EXPECT_EQ(drift_ratio_csv(report).rfind("x,ratio_1,ratio_2\n", 0), 0u);
}

TEST(Serialization, Fnv1aKnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(hex64(0xabcull), "0000000000000abc");
}
