#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "evenlab/init.hpp"
#include "evenlab/netmodel.hpp"
#include "evenlab/rng.hpp"
#include "evenlab/stats.hpp"

namespace evenlab {

inline constexpr std::uint64_t kMinPlanTrials = 1'000;
inline constexpr std::uint64_t kMinIndependenceTrials = 10'000;

// One Monte Carlo experiment on the activity of a single path. Trial t
// draws its weights under RngSeed{seed.master_seed, seed.stream_id + t}.
struct TrialPlan {
  NetworkSpec spec;
  InitScheme scheme;
  Vector input;
  PathId path;
  std::uint64_t trials = 100'000;
  RngSeed seed;
};

// Throws ValidationError for trials below kMinPlanTrials, a zero input or
// an input outside [-alpha, alpha]; StructuralError for a bad path.
void validate_plan(const TrialPlan& plan);

RngSeed trial_seed(const RngSeed& base, std::uint64_t trial);

// Values lambda_1 .. lambda_{H+1} written over the on-path weights
// w_{j_1 j_0}, ..., w_{j_{H+1} j_H} after each trial's full sampling.
struct ClampSpec {
  std::vector<double> values;

  // lambda_k = 1/d_{k-1} for every layer: the largest value inside the even
  // support of the hidden layers, and the same magnitude on the output.
  static ClampSpec extreme(const NetworkSpec& spec);
};

inline constexpr double kDefaultOutputClampBound = 1.0;

// Hidden-layer clamps must satisfy |lambda_k| <= 1/d_{k-1}; the output
// clamp must satisfy |lambda_{H+1}| <= output_bound.
void validate_clamp(const NetworkSpec& spec, const ClampSpec& clamp,
                    double output_bound = kDefaultOutputClampBound);

// Fills `out` with row `row` of weight layer `layer` for the trial whose
// generator seed is `trial`.
using RowSampler =
    std::function<void(const RngSeed& trial, std::size_t layer, std::size_t row, std::span<double> out)>;

// Sampler that reproduces sample_weights(spec, scheme, trial) row by row.
RowSampler scheme_sampler(const NetworkSpec& spec, const InitScheme& scheme);

// Activity of `path` in one trial. Only the weights the outcome depends on
// are drawn, and the path unit of each layer is evaluated first so that an
// inactive prefix stops the trial early. Agrees exactly with running
// forward_relu + path_is_active on the fully sampled (and clamped) network.
bool trial_path_active(const NetworkSpec& spec, const Vector& input, const PathId& path,
                       const RngSeed& trial, const RowSampler& sampler, const ClampSpec* clamp);

// Core Monte Carlo loop shared by the estimators. Parallel over trials,
// deterministic in (arguments, seed).
ProportionEstimate estimate_path_activity(const NetworkSpec& spec, const Vector& input,
                                          const PathId& path, std::uint64_t trials, const RngSeed& seed,
                                          const RowSampler& sampler, const ClampSpec* clamp = nullptr,
                                          double z = kDefaultZ);

// Per-trial outcomes of the plan, in trial order.
std::vector<bool> trial_outcomes(const TrialPlan& plan, const ClampSpec* clamp = nullptr);

// P(Z = 1) under fresh weights each trial. Target 2^-H.
ProportionEstimate estimate_activation_prob(const TrialPlan& plan, double z = kDefaultZ);

// P(Z = 1 | on-path weights = lambda). Approaches 2^-H as widths grow.
ProportionEstimate estimate_conditional_given_weights(const TrialPlan& plan, const ClampSpec& clamp,
                                                      double z = kDefaultZ,
                                                      double output_bound = kDefaultOutputClampBound);

// P(Z = 1 | X = mu). Target 2^-H for every admissible nonzero mu.
ProportionEstimate estimate_conditional_given_input(const TrialPlan& plan, const Vector& mu,
                                                    double z = kDefaultZ);

double theoretical_activation_prob(std::size_t hidden_depth);

struct IndependenceReport {
  double z_stat = 0.0;
  double threshold = kDefaultZ;
  bool pass = true;
};

// Two-proportion z-test; both estimates need >= kMinIndependenceTrials.
IndependenceReport independence_test(const ProportionEstimate& a, const ProportionEstimate& b,
                                     double threshold = kDefaultZ);

// Architecture family for depth sweeps: d_0 = input_width, every hidden
// layer hidden_width wide, d_{H+1} = output_width.
struct SweepTemplate {
  std::size_t input_width = 64;
  std::size_t hidden_width = 64;
  std::size_t output_width = 1;
  double path_scale = 1.0;
  double input_bound = 1.0;
  Vector input;  // length input_width

  NetworkSpec spec_for_depth(std::size_t hidden_depth) const;
};

struct DepthRow {
  std::size_t hidden_depth = 0;
  double target = 0.0;
  ProportionEstimate estimate;
};

// p_hat(H) / p_hat(H-1) with a delta-method interval on the log ratio.
struct DepthRatio {
  std::size_t hidden_depth = 0;
  double ratio = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool contains_half = false;
};

struct DepthSweep {
  std::vector<DepthRow> rows;
  std::vector<DepthRatio> ratios;
  double slope = 0.0;  // least squares of log2(p_hat) against H
  double intercept = 0.0;
  double slope_tolerance = 0.05;
  bool slope_pass = false;  // vacuously true for a single depth
  bool ratios_pass = false;
  bool targets_pass = false;  // every row's interval contains 2^-H
  bool pass = false;
};

inline constexpr double kDefaultSlopeTolerance = 0.05;

// Runs estimate_activation_prob for H = h_min..h_max along the all-zero
// path of each depth, sharing the seed across depths.
DepthSweep depth_decay_sweep(const SweepTemplate& tmpl, std::size_t h_min, std::size_t h_max,
                             const InitScheme& scheme, std::uint64_t trials, const RngSeed& seed,
                             double z = kDefaultZ, double slope_tolerance = kDefaultSlopeTolerance);

}  // namespace evenlab
