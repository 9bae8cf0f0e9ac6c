#pragma once

#include <cstdint>
#include <span>

namespace evenlab {

inline constexpr double kDefaultZ = 4.0;

// Binomial proportion with a Wilson score interval.
struct ProportionEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double z = kDefaultZ;

  bool contains(double p) const { return ci_lo <= p && p <= ci_hi; }
};

// Throws ValidationError when trials == 0, successes > trials or z <= 0.
ProportionEstimate wilson_estimate(std::uint64_t successes, std::uint64_t trials,
                                   double z = kDefaultZ);

struct TwoProportionTest {
  double z_stat = 0.0;
  double threshold = kDefaultZ;
  bool pass = true;
};

// Pooled two-proportion z-test; pass iff |z| < threshold. When the pooled
// proportion is 0 or 1 both samples agree exactly and z is 0.
TwoProportionTest two_proportion_z_test(const ProportionEstimate& a, const ProportionEstimate& b,
                                        double threshold = kDefaultZ);

// Sup-distance between the empirical CDFs of two samples.
double ks_statistic(std::span<const double> a, std::span<const double> b);

// Asymptotic two-sample KS critical value c(alpha) * sqrt((n+m)/(n*m)).
double ks_critical_value(std::size_t n, std::size_t m, double alpha);

// Welford running mean / variance.
class RunningMoments {
 public:
  void push(double x);
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased; 0 for n < 2
  double standard_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace evenlab
