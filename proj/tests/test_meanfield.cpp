#include <gtest/gtest.h>

#include <cmath>

#include "emg/meanfield.hpp"
#include "emg/rng.hpp"

namespace emg::meanfield {
namespace {

TEST(ClosedForm, ReferenceValues) {
  EXPECT_NEAR(population_gap_closed_form(250.0, 1.0 / 8.0), 2000.0 / 7.0, 1e-9);
  EXPECT_NEAR(population_gap_closed_form(1000.0 / 6.0, 1.0 / 27.0), 4500.0 / 26.0, 1e-9);
}

TEST(ClosedForm, SingleTermIsN0) {
  EXPECT_DOUBLE_EQ(population_gap_closed_form(123.0, 0.4, 1), 123.0);
  EXPECT_DOUBLE_EQ(population_gap_closed_form(7.0, 0.0, 1), 7.0);
}

TEST(ClosedForm, RejectsDivergentRatio) {
  EXPECT_THROW(population_gap_closed_form(1.0, 1.0), std::domain_error);
  EXPECT_THROW(population_gap_closed_form(1.0, 1.5), std::domain_error);
  EXPECT_THROW(population_gap_closed_form(1.0, -0.1), std::domain_error);
  EXPECT_THROW(population_gap_closed_form(1.0, 0.5, 0), std::domain_error);
}

TEST(ClosedForm, MonotoneInN0AndQ) {
  double prev = -1.0;
  for (double q = 0.0; q < 0.99; q += 0.01) {
    const double g = population_gap_closed_form(100.0, q);
    EXPECT_GT(g, prev);
    prev = g;
  }
  prev = -1.0;
  for (double n0 = 0.0; n0 < 1000.0; n0 += 10.0) {
    const double g = population_gap_closed_form(n0, 0.3);
    EXPECT_GT(g, prev);
    prev = g;
  }
}

TEST(Recursion, ReproducesReferenceRegimes) {
  const auto below = FlowParams::reference(Regime::below, 1000.0);
  EXPECT_DOUBLE_EQ(below.N0(), 250.0);
  EXPECT_DOUBLE_EQ(below.q(), 1.0 / 8.0);
  EXPECT_NEAR(population_gap_recursion(below), 2000.0 / 7.0, 1e-9);

  const auto above = FlowParams::reference(Regime::above, 1000.0);
  EXPECT_NEAR(above.N0(), 1000.0 / 6.0, 1e-12);
  EXPECT_NEAR(above.q(), 1.0 / 27.0, 1e-15);
  EXPECT_NEAR(population_gap_recursion(above), 4500.0 / 26.0, 1e-9);
}

TEST(Recursion, MatchesClosedFormOnRandomFlows) {
  Rng r(77);
  for (int i = 0; i < 100; ++i) {
    FlowParams f;
    f.N = 10.0 + 5000.0 * r.uniform();
    f.rho_A_prime = r.uniform();
    f.rho_A = (1.0 - f.rho_A_prime) * r.uniform();
    f.rho_B_prime = r.uniform();
    f.rho_B = (1.0 - f.rho_B_prime) * r.uniform();
    f.bad_fraction = r.uniform();
    if (i % 3 == 0) f.n = 1 + static_cast<std::int64_t>(r.uniform() * 20);
    const double expected = population_gap_closed_form(f.N0(), f.q(), f.n);
    EXPECT_NEAR(population_gap_recursion(f), expected, 1e-9 * std::max(1.0, expected)) << i;
  }
}

TEST(Recursion, NoWithdrawalKeepsInitialGap) {
  FlowParams f;
  f.rho_A_prime = 0.0;
  f.rho_B_prime = 0.0;
  f.initial_gap = 42.0;
  EXPECT_DOUBLE_EQ(population_gap_recursion(f), 42.0);
  f.bidirectional = true;
  EXPECT_DOUBLE_EQ(population_gap_recursion(f), 42.0);
}

TEST(Recursion, SymmetricTwoWayFlowKeepsEqualSplit) {
  for (double bad : {kBadFractionBelow, kBadFractionAbove}) {
    FlowParams f;
    f.bidirectional = true;
    f.bad_fraction = bad;
    f.rho_A = f.rho_B = 0.3;
    f.rho_A_prime = f.rho_B_prime = 0.6;
    for (std::int64_t n : {1, 5, 50}) {
      f.n = n;
      EXPECT_EQ(population_gap_recursion(f), 0.0);
    }
    f.n.reset();
    EXPECT_EQ(population_gap_recursion(f), 0.0);
  }
}

TEST(Recursion, ReportsNonConvergence) {
  FlowParams f;
  f.bad_fraction = 1.0;
  f.rho_A = f.rho_B = 0.0;
  f.rho_A_prime = f.rho_B_prime = 1.0;
  EXPECT_THROW(population_gap_recursion(f), NonConvergence);
}

TEST(Recursion, RejectsInvalidFlows) {
  FlowParams f;
  f.rho_A = 0.8;
  f.rho_A_prime = 0.5;
  EXPECT_THROW(population_gap_recursion(f), std::domain_error);
  f = FlowParams{};
  f.bad_fraction = 1.2;
  EXPECT_THROW(population_gap_recursion(f), std::domain_error);
}

TEST(Consistency, AboveGapSmallerThanBelow) {
  EXPECT_TRUE(gap_consistency_check(1000.0));
  EXPECT_TRUE(gap_consistency_check(14.0));
  const auto below = reference_pair(Regime::below, 14.0);
  EXPECT_NEAR(population_gap_closed_form(below.N0, below.q), 14.0 * 2.0 / 7.0, 1e-12);
}

TEST(Consistency, EqualPairsAreNotOrdered) {
  const GapPair p{250.0, 0.125};
  EXPECT_FALSE(gap_consistency_check(p, p));
  EXPECT_THROW(gap_consistency_check(0.0), std::domain_error);
}

TEST(RoundTripSign, Examples) {
  EXPECT_EQ(round_trip_sign(0.2), Sign::positive);
  EXPECT_EQ(round_trip_sign(0.5), Sign::zero);
  EXPECT_EQ(round_trip_sign(0.8), Sign::negative);
  EXPECT_STREQ(to_string(Sign::zero), "zero");
  EXPECT_THROW(round_trip_sign(1.5), std::domain_error);
}

}  // namespace
}  // namespace emg::meanfield
