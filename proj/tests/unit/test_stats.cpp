#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "evenlab/errors.hpp"
#include "evenlab/stats.hpp"

using namespace evenlab;

TEST(Wilson, HandComputedInterval) {
  // p = 0.5, n = 100, z = 2: center 0.5, half-width 2*sqrt(0.25/100 + 1/10000)/(1 + 4/100)
  const ProportionEstimate e = wilson_estimate(50, 100, 2.0);
  const double half = 2.0 * std::sqrt(0.25 / 100.0 + 4.0 / 40000.0) / 1.04;
  EXPECT_DOUBLE_EQ(e.p_hat, 0.5);
  EXPECT_NEAR(e.ci_lo, 0.5 - half, 1e-15);
  EXPECT_NEAR(e.ci_hi, 0.5 + half, 1e-15);
}

TEST(Wilson, ZeroSuccessesStaysInsideUnit) {
  const ProportionEstimate e = wilson_estimate(0, 1000);
  EXPECT_EQ(e.ci_lo, 0.0);
  EXPECT_GT(e.ci_hi, 0.0);
  EXPECT_LE(e.ci_hi, 16.0 / 1016.0 + 1e-15);  // z^2 / (n + z^2)
  const ProportionEstimate f = wilson_estimate(1000, 1000);
  EXPECT_EQ(f.ci_hi, 1.0);
  EXPECT_LE(f.ci_lo, f.p_hat);
}

TEST(Wilson, RejectsBadArguments) {
  EXPECT_THROW(wilson_estimate(0, 0), ValidationError);
  EXPECT_THROW(wilson_estimate(5, 4), ValidationError);
  EXPECT_THROW(wilson_estimate(1, 4, 0.0), ValidationError);
}

TEST(TwoProportion, IdenticalPass) {
  const ProportionEstimate a = wilson_estimate(5000, 10000);
  const TwoProportionTest t = two_proportion_z_test(a, a);
  EXPECT_EQ(t.z_stat, 0.0);
  EXPECT_TRUE(t.pass);
}

TEST(TwoProportion, HalfVersusQuarterFailsDecisively) {
  const ProportionEstimate a = wilson_estimate(50000, 100000);
  const ProportionEstimate b = wilson_estimate(25000, 100000);
  const TwoProportionTest t = two_proportion_z_test(a, b);
  // pooled p = 0.375, se = sqrt(0.375*0.625*2e-5)
  EXPECT_NEAR(t.z_stat, 0.25 / std::sqrt(0.375 * 0.625 * 2e-5), 1e-9);
  EXPECT_GT(std::fabs(t.z_stat), 100.0);
  EXPECT_FALSE(t.pass);
}

TEST(TwoProportion, DegeneratePool) {
  const ProportionEstimate a = wilson_estimate(0, 10000);
  EXPECT_EQ(two_proportion_z_test(a, a).z_stat, 0.0);
}

TEST(Ks, StatisticOnSmallSamples) {
  const std::vector<double> a = {1, 2, 3, 4};
  const std::vector<double> b = {3, 4, 5, 6};
  EXPECT_DOUBLE_EQ(ks_statistic(a, b), 0.5);
  EXPECT_DOUBLE_EQ(ks_statistic(a, a), 0.0);
  const std::vector<double> c = {10, 11};
  EXPECT_DOUBLE_EQ(ks_statistic(a, c), 1.0);
}

TEST(Ks, CriticalValue) {
  // c(0.001) = sqrt(-ln(0.0005)/2) = 1.9495...
  const double c = std::sqrt(-std::log(0.0005) / 2.0);
  EXPECT_NEAR(ks_critical_value(100, 100, 0.001), c * std::sqrt(0.02), 1e-12);
}

TEST(RunningMoments, MatchesTwoPass) {
  const std::vector<double> xs = {1e9 + 1, 1e9 + 2, 1e9 + 4, 1e9 + 7};
  RunningMoments m;
  for (double x : xs) m.push(x);
  EXPECT_EQ(m.count(), 4u);
  EXPECT_DOUBLE_EQ(m.mean(), 1e9 + 3.5);
  // deviations -2.5, -1.5, 0.5, 3.5 -> sum sq 21, /3
  EXPECT_NEAR(m.variance(), 7.0, 1e-6);
  EXPECT_NEAR(m.standard_error(), std::sqrt(7.0 / 4.0), 1e-6);
  RunningMoments one;
  one.push(3.0);
  EXPECT_EQ(one.variance(), 0.0);
}
