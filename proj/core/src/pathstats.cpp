#include "evenlab/pathstats.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "evenlab/errors.hpp"
#include "evenlab/parallel.hpp"

namespace evenlab {

void validate_plan(const TrialPlan& plan) {
  if (plan.trials < kMinPlanTrials) {
    throw_validation("trial plan needs at least " + std::to_string(kMinPlanTrials) + " trials, got " +
                     std::to_string(plan.trials));
  }
  validate_input(plan.spec, plan.input);
  if (plan.input.isZero(0.0)) {
    throw_validation("trial plan input is the zero vector; every path would be inactive");
  }
  validate_path(plan.spec, plan.path);
  validate_scheme(plan.spec, plan.scheme);
}

RngSeed trial_seed(const RngSeed& base, std::uint64_t trial) {
  return RngSeed{base.master_seed, base.stream_id + trial};
}

ClampSpec ClampSpec::extreme(const NetworkSpec& spec) {
  ClampSpec clamp;
  for (std::size_t k = 0; k < spec.layer_count(); ++k) {
    clamp.values.push_back(1.0 / static_cast<double>(spec.fan_in(k)));
  }
  return clamp;
}

void validate_clamp(const NetworkSpec& spec, const ClampSpec& clamp, double output_bound) {
  if (clamp.values.size() != spec.layer_count()) {
    throw_structural("clamp has " + std::to_string(clamp.values.size()) + " values, expected H+1 = " +
                     std::to_string(spec.layer_count()));
  }
  for (std::size_t k = 0; k < clamp.values.size(); ++k) {
    const double v = clamp.values[k];
    const bool output = k + 1 == clamp.values.size();
    const double bound = output ? output_bound : 1.0 / static_cast<double>(spec.fan_in(k));
    if (!std::isfinite(v) || std::fabs(v) > bound) {
      throw_validation("clamp lambda_" + std::to_string(k + 1) + " = " + std::to_string(v) +
                       " exceeds its bound " + std::to_string(bound));
    }
  }
}

RowSampler scheme_sampler(const NetworkSpec& spec, const InitScheme& scheme) {
  return [spec, scheme](const RngSeed& trial, std::size_t layer, std::size_t row, std::span<double> out) {
    sample_row(spec, scheme, trial, layer, row, out);
  };
}

namespace {

struct Workspace {
  std::vector<double> signal;
  std::vector<double> next;
  std::vector<double> row;
};

double dot_ascending(std::span<const double> w, std::span<const double> h) {
  double u = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) u += w[j] * h[j];
  return u;
}

}  // namespace

bool trial_path_active(const NetworkSpec& spec, const Vector& input, const PathId& path,
                       const RngSeed& trial, const RowSampler& sampler, const ClampSpec* clamp) {
  thread_local Workspace ws;
  const std::size_t hidden = spec.hidden_depth();
  ws.signal.assign(input.data(), input.data() + input.size());

  for (std::size_t k = 0; k < hidden; ++k) {
    const std::size_t fan_in = spec.fan_in(k);
    const std::size_t units = spec.fan_out(k);
    const std::size_t path_unit = path.neuron_chain[k + 1];
    ws.row.resize(fan_in);

    sampler(trial, k, path_unit, ws.row);
    if (clamp != nullptr) ws.row[path.neuron_chain[k]] = clamp->values[k];
    const double path_net = dot_ascending(ws.row, ws.signal);
    if (!(path_net > 0.0)) return false;
    if (k + 1 == hidden) return true;

    ws.next.assign(units, 0.0);
    ws.next[path_unit] = path_net;
    for (std::size_t l = 0; l < units; ++l) {
      if (l == path_unit) continue;
      sampler(trial, k, l, ws.row);
      const double net = dot_ascending(ws.row, ws.signal);
      ws.next[l] = net > 0.0 ? net : 0.0;
    }
    ws.signal.swap(ws.next);
  }
  return true;
}

ProportionEstimate estimate_path_activity(const NetworkSpec& spec, const Vector& input,
                                          const PathId& path, std::uint64_t trials, const RngSeed& seed,
                                          const RowSampler& sampler, const ClampSpec* clamp, double z) {
  validate_input(spec, input);
  validate_path(spec, path);
  if (trials == 0) throw_validation("estimate_path_activity: trials must be positive");
  const std::uint64_t successes = parallel_count(trials, [&](std::uint64_t t) {
    return trial_path_active(spec, input, path, trial_seed(seed, t), sampler, clamp);
  });
  return wilson_estimate(successes, trials, z);
}

std::vector<bool> trial_outcomes(const TrialPlan& plan, const ClampSpec* clamp) {
  validate_plan(plan);
  if (clamp != nullptr) validate_clamp(plan.spec, *clamp);
  const RowSampler sampler = scheme_sampler(plan.spec, plan.scheme);
  std::vector<char> flags(plan.trials, 0);
  parallel_chunks(plan.trials, [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      flags[t] = trial_path_active(plan.spec, plan.input, plan.path, trial_seed(plan.seed, t), sampler, clamp);
    }
  });
  return std::vector<bool>(flags.begin(), flags.end());
}

ProportionEstimate estimate_activation_prob(const TrialPlan& plan, double z) {
  validate_plan(plan);
  return estimate_path_activity(plan.spec, plan.input, plan.path, plan.trials, plan.seed,
                                scheme_sampler(plan.spec, plan.scheme), nullptr, z);
}

ProportionEstimate estimate_conditional_given_weights(const TrialPlan& plan, const ClampSpec& clamp,
                                                      double z, double output_bound) {
  validate_plan(plan);
  validate_clamp(plan.spec, clamp, output_bound);
  return estimate_path_activity(plan.spec, plan.input, plan.path, plan.trials, plan.seed,
                                scheme_sampler(plan.spec, plan.scheme), &clamp, z);
}

ProportionEstimate estimate_conditional_given_input(const TrialPlan& plan, const Vector& mu, double z) {
  TrialPlan at_mu = plan;
  at_mu.input = mu;
  return estimate_activation_prob(at_mu, z);
}

double theoretical_activation_prob(std::size_t hidden_depth) {
  return std::ldexp(1.0, -static_cast<int>(hidden_depth));
}

IndependenceReport independence_test(const ProportionEstimate& a, const ProportionEstimate& b,
                                     double threshold) {
  if (a.trials < kMinIndependenceTrials || b.trials < kMinIndependenceTrials) {
    throw_validation("independence_test needs at least " + std::to_string(kMinIndependenceTrials) +
                     " trials per estimate");
  }
  const TwoProportionTest t = two_proportion_z_test(a, b, threshold);
  return IndependenceReport{t.z_stat, t.threshold, t.pass};
}

NetworkSpec SweepTemplate::spec_for_depth(std::size_t hidden_depth) const {
  std::vector<std::size_t> widths;
  widths.push_back(input_width);
  for (std::size_t k = 0; k < hidden_depth; ++k) widths.push_back(hidden_width);
  widths.push_back(output_width);
  return NetworkSpec(std::move(widths), path_scale, input_bound);
}

DepthSweep depth_decay_sweep(const SweepTemplate& tmpl, std::size_t h_min, std::size_t h_max,
                             const InitScheme& scheme, std::uint64_t trials, const RngSeed& seed, double z,
                             double slope_tolerance) {
  if (h_min < 1 || h_max < h_min) {
    throw_validation("depth sweep needs 1 <= h_min <= h_max, got [" + std::to_string(h_min) + ", " +
                     std::to_string(h_max) + "]");
  }
  DepthSweep sweep;
  sweep.slope_tolerance = slope_tolerance;
  for (std::size_t h = h_min; h <= h_max; ++h) {
    TrialPlan plan{tmpl.spec_for_depth(h), scheme, tmpl.input,
                   PathId{0, std::vector<std::size_t>(h + 1, 0)}, trials, seed};
    sweep.rows.push_back(DepthRow{h, theoretical_activation_prob(h), estimate_activation_prob(plan, z)});
  }

  sweep.ratios_pass = true;
  for (std::size_t i = 1; i < sweep.rows.size(); ++i) {
    const ProportionEstimate& prev = sweep.rows[i - 1].estimate;
    const ProportionEstimate& cur = sweep.rows[i].estimate;
    DepthRatio r;
    r.hidden_depth = sweep.rows[i].hidden_depth;
    if (prev.successes == 0 || cur.successes == 0) {
      r.ratio = prev.successes == 0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
      r.ci_lo = 0.0;
      r.ci_hi = std::numeric_limits<double>::infinity();
    } else {
      r.ratio = cur.p_hat / prev.p_hat;
      const double log_se = std::sqrt((1.0 - cur.p_hat) / static_cast<double>(cur.successes) +
                                      (1.0 - prev.p_hat) / static_cast<double>(prev.successes));
      r.ci_lo = r.ratio * std::exp(-z * log_se);
      r.ci_hi = r.ratio * std::exp(z * log_se);
    }
    r.contains_half = r.ci_lo <= 0.5 && 0.5 <= r.ci_hi;
    sweep.ratios_pass = sweep.ratios_pass && r.contains_half;
    sweep.ratios.push_back(r);
  }

  sweep.targets_pass = true;
  for (const DepthRow& row : sweep.rows) {
    sweep.targets_pass = sweep.targets_pass && row.estimate.contains(row.target);
  }

  // least squares of log2(p_hat) on H
  bool fit_ok = sweep.rows.size() >= 2;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const DepthRow& row : sweep.rows) {
    if (row.estimate.successes == 0) {
      fit_ok = false;
      break;
    }
    const double x = static_cast<double>(row.hidden_depth);
    const double y = std::log2(row.estimate.p_hat);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  if (fit_ok) {
    const double n = static_cast<double>(sweep.rows.size());
    sweep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    sweep.intercept = (sy - sweep.slope * sx) / n;
    sweep.slope_pass = std::fabs(sweep.slope + 1.0) <= slope_tolerance;
  } else {
    sweep.slope = std::numeric_limits<double>::quiet_NaN();
    sweep.intercept = std::numeric_limits<double>::quiet_NaN();
    sweep.slope_pass = sweep.rows.size() < 2;
  }
  sweep.pass = sweep.ratios_pass && sweep.slope_pass && sweep.targets_pass;
  return sweep;
}

}  // namespace evenlab
