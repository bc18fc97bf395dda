#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "svcharme/errors.hpp"

using namespace svcharme;

namespace {

TransitionMatrix make_tm(std::vector<std::vector<double>> raw) { return TransitionMatrix::validate(std::move(raw)); }

TransitionMatrix random_positive(std::size_t k, std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<std::vector<double>> raw(k, std::vector<double>(k));
  for (auto& row : raw) {
    double sum = 0.0;
    for (double& a : row) sum += (a = u(engine));
    for (double& a : row) a /= sum;
    // Push the rounding residue into the largest entry.
    double total = 0.0;
    for (const double a : row) total += a;
    *std::max_element(row.begin(), row.end()) += 1.0 - total;
  }
  return make_tm(raw);
}

}  // namespace

TEST(TransitionMatrix, AcceptsStochasticRows) {
  EXPECT_EQ(make_tm({{0.9, 0.1}, {0.2, 0.8}}).size(), 2u);
  EXPECT_EQ(make_tm({{1.0}}).size(), 1u);
}

TEST(TransitionMatrix, RejectsRowSumWithoutRenormalizing) {
  try {
    (void)make_tm({{0.9, 0.2}, {0.2, 0.8}});
    FAIL() << "expected NonStochasticRow";
  } catch (const NonStochasticRow& e) {
    EXPECT_EQ(e.row(), 0u);
    EXPECT_NEAR(e.sum(), 1.1, 1e-15);
    EXPECT_EQ(e.code(), ErrorCode::non_stochastic_row);
  }
}

TEST(TransitionMatrix, RowSumToleranceIs1e12) {
  EXPECT_NO_THROW((void)make_tm({{0.5 + 5e-13, 0.5}, {0.5, 0.5}}));
  EXPECT_THROW((void)make_tm({{0.5 + 5e-12, 0.5}, {0.5, 0.5}}), NonStochasticRow);
}

TEST(TransitionMatrix, RejectsNegativeEntry) {
  try {
    (void)make_tm({{1.2, -0.2}, {0.5, 0.5}});
    FAIL() << "expected NegativeEntry";
  } catch (const NegativeEntry& e) {
    EXPECT_EQ(e.row(), 0u);
    EXPECT_EQ(e.col(), 1u);
  }
}

TEST(TransitionMatrix, RejectsNonSquareAndEmpty) {
  EXPECT_THROW((void)make_tm({{0.5, 0.5}}), Error);
  EXPECT_THROW((void)make_tm({}), Error);
}

TEST(Irreducibility, SpecExamples) {
  EXPECT_TRUE(is_irreducible(make_tm({{0.9, 0.1}, {0.2, 0.8}})));
  EXPECT_FALSE(is_irreducible(make_tm({{1, 0}, {0, 1}})));
  EXPECT_TRUE(is_irreducible(make_tm({{0, 1}, {1, 0}})));
  EXPECT_FALSE(is_irreducible(make_tm({{0.5, 0.5, 0}, {0, 1, 0}, {0, 0.5, 0.5}})));
}

TEST(Period, SpecExamples) {
  EXPECT_EQ(period(make_tm({{0, 1}, {1, 0}})), 2u);
  EXPECT_EQ(period(make_tm({{0.5, 0.5}, {0.5, 0.5}})), 1u);
  EXPECT_EQ(period(make_tm({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}})), 3u);
  EXPECT_EQ(period(make_tm({{1.0}})), 1u);
}

TEST(Period, MixedCycleLengthsGiveGcd) {
  // Cycles 1->2->1 (length 2) and 1->2->3->4->1 (length 4): period 2.
  EXPECT_EQ(period(make_tm({{0, 1, 0, 0}, {0.5, 0, 0.5, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}})), 2u);
  // Cycles of length 2 and 3: period 1.
  EXPECT_EQ(period(make_tm({{0, 1, 0}, {0.5, 0, 0.5}, {1, 0, 0}})), 1u);
}

TEST(Period, ReducibleChainThrows) {
  try {
    (void)period(make_tm({{1, 0}, {0, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::reducible_chain);
  }
}

TEST(Period, PositiveMatricesAreIrreducibleAndAperiodic) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const TransitionMatrix m = random_positive(2 + seed % 6, seed);
    EXPECT_TRUE(is_irreducible(m));
    EXPECT_EQ(period(m), 1u);
  }
}

TEST(Stationary, SpecExamples) {
  const StationaryDistribution a = stationary_distribution(make_tm({{0.9, 0.1}, {0.2, 0.8}}));
  EXPECT_NEAR(a.probabilities[0], 2.0 / 3.0, 1e-14);
  EXPECT_NEAR(a.probabilities[1], 1.0 / 3.0, 1e-14);
  EXPECT_DOUBLE_EQ(stationary_distribution(make_tm({{1.0}})).probabilities[0], 1.0);
  const StationaryDistribution c = stationary_distribution(make_tm({{0.5, 0.5}, {0.5, 0.5}}));
  EXPECT_NEAR(c.probabilities[0], 0.5, 1e-15);
  EXPECT_NEAR(c.probabilities[1], 0.5, 1e-15);
}

TEST(Stationary, DefectiveChainsThrow) {
  try {
    (void)stationary_distribution(make_tm({{0, 1}, {1, 0}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::periodic_chain);
  }
  try {
    (void)stationary_distribution(make_tm({{1, 0}, {0, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::reducible_chain);
  }
}

TEST(Stationary, LinearSolveAgreesWithPowerIteration) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const TransitionMatrix m = random_positive(2 + seed % 7, seed);
    const StationaryDistribution solve = stationary_distribution(m);
    const StationaryDistribution power = stationary_distribution_power(m);
    EXPECT_LT(solve.balance_residual(m), 1e-10);
    double sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_NEAR(solve.probabilities[i], power.probabilities[i], 1e-10);
      EXPECT_GE(solve.probabilities[i], 0.0);
      sum += solve.probabilities[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-14);
  }
}

TEST(Stationary, PowerIterationMatchesHandSolvedReference) {
  const StationaryDistribution p = stationary_distribution_power(make_tm({{0.9, 0.1}, {0.2, 0.8}}), 10'000);
  EXPECT_NEAR(p.probabilities[0], 2.0 / 3.0, 1e-12);
}

TEST(SampleChain, SingleRegimeIsConstant) {
  const RegimeSequence s = sample_chain(make_tm({{1.0}}), Regime(1), 5, 99);
  ASSERT_EQ(s.states.size(), 5u);
  for (const Regime r : s.states) EXPECT_EQ(r.label(), 1u);
}

TEST(SampleChain, DeterministicAlternation) {
  const RegimeSequence s = sample_chain(make_tm({{0, 1}, {1, 0}}), Regime(1), 4, 3);
  const std::vector<std::size_t> expected{1, 2, 1, 2};
  for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(s.states[t].label(), expected[t]);
}

TEST(SampleChain, FrequenciesConvergeToStationaryAtTwentySeeds) {
  const TransitionMatrix m = make_tm({{0.9, 0.1}, {0.2, 0.8}});
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const RegimeSequence s = sample_chain(m, Regime(1), 1'000'000, seed);
    const std::vector<double> f = empirical_frequencies(s, 2);
    EXPECT_NEAR(f[0], 2.0 / 3.0, 0.005) << "seed " << seed;
  }
}

TEST(SampleChain, PureFunctionOfArguments) {
  const TransitionMatrix m = random_positive(4, 5);
  const RegimeSequence a = sample_chain(m, Regime(2), 1000, 17);
  const RegimeSequence b = sample_chain(m, Regime(2), 1000, 17);
  const RegimeSequence c = sample_chain(m, Regime(2), 1000, 18);
  EXPECT_EQ(a.states, b.states);
  EXPECT_NE(a.states, c.states);
  EXPECT_EQ(a.states.front().label(), 2u);
  EXPECT_EQ(a.seed, 17u);
}

TEST(SampleChain, TransitionFrequenciesMatchRows) {
  const TransitionMatrix m = make_tm({{0.2, 0.3, 0.5}, {0.6, 0.1, 0.3}, {0.25, 0.25, 0.5}});
  const RegimeSequence s = sample_chain(m, Regime(1), 600'000, 8);
  std::vector<std::vector<double>> counts(3, std::vector<double>(3, 0.0));
  for (std::size_t t = 1; t < s.states.size(); ++t) counts[s.states[t - 1].index()][s.states[t].index()] += 1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    double row = 0.0;
    for (const double c : counts[i]) row += c;
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(counts[i][j] / row, m(i, j), 0.005);
  }
}

TEST(SampleChain, InvalidInit) {
  const TransitionMatrix m = make_tm({{0.9, 0.1}, {0.2, 0.8}});
  for (const std::size_t label : {0u, 3u}) {
    try {
      (void)sample_chain(m, Regime(label), 5, 1);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::invalid_init);
    }
  }
  EXPECT_THROW((void)sample_chain(m, Regime(1), 0, 1), Error);
}
