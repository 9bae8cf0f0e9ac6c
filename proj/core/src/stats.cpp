#include "evenlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "evenlab/errors.hpp"

namespace evenlab {

ProportionEstimate wilson_estimate(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw_validation("wilson_estimate: trials must be positive");
  if (successes > trials) {
    throw_validation("wilson_estimate: successes (" + std::to_string(successes) +
                     ") exceed trials (" + std::to_string(trials) + ")");
  }
  if (!(z > 0.0) || !std::isfinite(z)) throw_validation("wilson_estimate: z must be positive");

  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;

  ProportionEstimate est;
  est.successes = successes;
  est.trials = trials;
  est.p_hat = p;
  est.z = z;
  // Clamp against rounding so that ci_lo <= p_hat <= ci_hi always holds.
  est.ci_lo = std::clamp(std::min(center - half, p), 0.0, 1.0);
  est.ci_hi = std::clamp(std::max(center + half, p), 0.0, 1.0);
  if (successes == 0) est.ci_lo = 0.0;
  if (successes == trials) est.ci_hi = 1.0;
  return est;
}

TwoProportionTest two_proportion_z_test(const ProportionEstimate& a, const ProportionEstimate& b,
                                        double threshold) {
  if (a.trials == 0 || b.trials == 0) throw_validation("two_proportion_z_test: empty estimate");
  const double na = static_cast<double>(a.trials);
  const double nb = static_cast<double>(b.trials);
  const double pooled = static_cast<double>(a.successes + b.successes) / (na + nb);
  const double pa = static_cast<double>(a.successes) / na;
  const double pb = static_cast<double>(b.successes) / nb;

  TwoProportionTest out;
  out.threshold = threshold;
  const double var = pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb);
  out.z_stat = var > 0.0 ? (pa - pb) / std::sqrt(var) : 0.0;
  out.pass = std::fabs(out.z_stat) < threshold;
  return out;
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw_validation("ks_statistic: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());

  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0 || !(alpha > 0.0 && alpha < 1.0)) {
    throw_validation("ks_critical_value: invalid arguments");
  }
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

void RunningMoments::push(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningMoments::variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double RunningMoments::standard_error() const {
  return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

}  // namespace evenlab
