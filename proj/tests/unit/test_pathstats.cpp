#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "evenlab/errors.hpp"
#include "evenlab/pathstats.hpp"

using namespace evenlab;

namespace {

NetworkSpec uniform_spec(std::size_t hidden, std::size_t width) {
  std::vector<std::size_t> widths(hidden + 1, width);
  widths.push_back(1);
  return NetworkSpec(widths);
}

Vector mixed_input(std::size_t n) {
  Vector x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = std::sin(1.0 + 2.0 * static_cast<double>(i));
  return x;
}

TrialPlan make_plan(std::size_t hidden, std::size_t width, const char* scheme, std::uint64_t trials,
                    std::uint64_t seed) {
  const NetworkSpec spec = uniform_spec(hidden, width);
  return TrialPlan{spec, InitScheme::parse(scheme), mixed_input(width),
                   PathId{0, std::vector<std::size_t>(hidden + 1, 0)}, trials, RngSeed{seed, 0}};
}

// Weights uniform on [0, 1/n]: not even, used to show the even hypothesis matters.
RowSampler nonnegative_sampler(const NetworkSpec& spec) {
  return [spec](const RngSeed& trial, std::size_t layer, std::size_t row, std::span<double> out) {
    const CounterRng rng = CounterRng(trial).substream(1000 + layer);
    const double n = static_cast<double>(spec.fan_in(layer));
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = rng.uniform(row * out.size() + j) / n;
  };
}

}  // namespace

TEST(Kernel, MatchesFullForwardPass) {
  for (const char* scheme : {"even-uniform", "even-truncated-normal", "he-normal:fan-in"}) {
    const TrialPlan plan = make_plan(3, 5, scheme, 1000, 77);
    const RowSampler sampler = scheme_sampler(plan.spec, plan.scheme);
    for (const PathId& path : {PathId{0, {0, 0, 0, 0}}, PathId{0, {4, 2, 1, 3}}}) {
      for (bool clamped : {false, true}) {
        ClampSpec clamp = ClampSpec::extreme(plan.spec);
        clamp.values[1] = -clamp.values[1];
        int agree = 0, active = 0;
        for (std::uint64_t t = 0; t < 400; ++t) {
          const RngSeed seed = trial_seed(plan.seed, t);
          WeightSet w = sample_weights(plan.spec, plan.scheme, seed);
          if (clamped) {
            for (std::size_t k = 0; k < w.layers.size(); ++k) {
              const std::size_t to = k + 1 < path.neuron_chain.size() ? path.neuron_chain[k + 1] : path.output_neuron;
              w.layers[k](static_cast<Eigen::Index>(to), static_cast<Eigen::Index>(path.neuron_chain[k])) =
                  clamp.values[k];
            }
          }
          const bool literal = path_is_active(forward_relu(plan.spec, w, plan.input).record, path);
          const bool lazy = trial_path_active(plan.spec, plan.input, path, seed, sampler, clamped ? &clamp : nullptr);
          agree += literal == lazy;
          active += literal;
        }
        EXPECT_EQ(agree, 400) << scheme;
        EXPECT_GT(active, 0);
      }
    }
  }
}

TEST(ActivationProb, DepthOneHalf) {
  const ProportionEstimate e = estimate_activation_prob(make_plan(1, 16, "even-uniform", 100'000, 1));
  EXPECT_TRUE(e.contains(0.5)) << e.p_hat;
  EXPECT_EQ(e.trials, 100'000u);
  EXPECT_LE(e.ci_lo, e.p_hat);
  EXPECT_LE(e.p_hat, e.ci_hi);
}

TEST(ActivationProb, WidthFreeAtWidthTwo) {
  for (std::size_t h = 1; h <= 3; ++h) {
    for (const char* scheme : {"even-uniform", "even-truncated-normal"}) {
      const ProportionEstimate e = estimate_activation_prob(make_plan(h, 2, scheme, 50'000, 2));
      EXPECT_TRUE(e.contains(theoretical_activation_prob(h))) << scheme << " H=" << h << " p=" << e.p_hat;
    }
  }
}

TEST(ActivationProb, NonEvenSchemeDeviates) {
  const TrialPlan plan = make_plan(1, 8, "even-uniform", 20'000, 3);
  const Vector positive = Vector::Constant(8, 0.5);
  const ProportionEstimate e = estimate_path_activity(plan.spec, positive, plan.path, plan.trials, plan.seed,
                                                      nonnegative_sampler(plan.spec));
  EXPECT_FALSE(e.contains(0.5));
  EXPECT_GT(e.p_hat, 0.9);
  EXPECT_TRUE(estimate_path_activity(plan.spec, positive, plan.path, plan.trials, plan.seed,
                                     scheme_sampler(plan.spec, plan.scheme))
                  .contains(0.5));
}

TEST(ActivationProb, DeterministicAcrossWorkerCounts) {
  const TrialPlan plan = make_plan(2, 12, "even-truncated-normal", 20'000, 4);
  const ProportionEstimate a = estimate_activation_prob(plan);
  ::setenv("EVENLAB_MAX_WORKERS", "1", 1);
  const ProportionEstimate b = estimate_activation_prob(plan);
  ::unsetenv("EVENLAB_MAX_WORKERS");
  EXPECT_EQ(a.successes, b.successes);
  const std::vector<bool> outcomes = trial_outcomes(plan);
  std::uint64_t count = 0;
  for (bool o : outcomes) count += o;
  EXPECT_EQ(count, a.successes);
}

TEST(ActivationProb, NestedTrialsStayInsidePreviousInterval) {
  int escapes = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const ProportionEstimate small = estimate_activation_prob(make_plan(2, 8, "even-uniform", 2'000, seed));
    const ProportionEstimate large = estimate_activation_prob(make_plan(2, 8, "even-uniform", 20'000, seed));
    escapes += !small.contains(large.p_hat);
  }
  // nominal escape rate at z = 4 is ~6e-5 per comparison
  EXPECT_LE(escapes, 1);
}

TEST(ActivationProb, PlanValidation) {
  TrialPlan plan = make_plan(1, 4, "even-uniform", 999, 0);
  EXPECT_THROW(estimate_activation_prob(plan), ValidationError);
  plan.trials = 1000;
  plan.input.setZero();
  EXPECT_THROW(estimate_activation_prob(plan), ValidationError);
  plan.input = Vector::Constant(4, 2.0);
  EXPECT_THROW(estimate_activation_prob(plan), ValidationError);
  plan.input = Vector::Ones(4);
  plan.path.neuron_chain = {0, 4};
  EXPECT_THROW(estimate_activation_prob(plan), StructuralError);
}

TEST(ConditionalWeights, OutputClampIrrelevantAtDepthOne) {
  // Overwriting only the output weight after sampling leaves every trial's
  // activity unchanged: Z depends on hidden-layer weights alone.
  const TrialPlan plan = make_plan(1, 16, "even-uniform", 20'000, 5);
  const ProportionEstimate base = estimate_activation_prob(plan);
  std::uint64_t s = 0;
  for (std::uint64_t t = 0; t < plan.trials; ++t) {
    WeightSet w = sample_weights(plan.spec, plan.scheme, trial_seed(plan.seed, t));
    w.layers[1](0, 0) = 0.9;
    s += path_is_active(forward_relu(plan.spec, w, plan.input).record, plan.path);
  }
  const ProportionEstimate cond = wilson_estimate(s, plan.trials);
  EXPECT_EQ(cond.successes, base.successes);
  EXPECT_TRUE(independence_test(base, cond).pass);
}

TEST(ConditionalWeights, WideCloserThanNarrow) {
  const TrialPlan narrow = make_plan(2, 4, "even-uniform", 50'000, 6);
  const TrialPlan wide = make_plan(2, 128, "even-uniform", 50'000, 6);
  const double dn = std::fabs(
      estimate_conditional_given_weights(narrow, ClampSpec::extreme(narrow.spec)).p_hat - 0.25);
  const double dw = std::fabs(estimate_conditional_given_weights(wide, ClampSpec::extreme(wide.spec)).p_hat - 0.25);
  EXPECT_GT(dn, dw);
}

TEST(ConditionalWeights, ClampValidation) {
  const TrialPlan plan = make_plan(2, 4, "even-uniform", 1000, 0);
  ClampSpec clamp = ClampSpec::extreme(plan.spec);
  EXPECT_EQ(clamp.values, (std::vector<double>{0.25, 0.25, 0.25}));
  clamp.values[0] = 0.26;
  EXPECT_THROW(estimate_conditional_given_weights(plan, clamp), ValidationError);
  clamp.values[0] = 0.25;
  clamp.values[2] = 1.5;
  EXPECT_THROW(estimate_conditional_given_weights(plan, clamp), ValidationError);
  EXPECT_NO_THROW(estimate_conditional_given_weights(plan, clamp, kDefaultZ, 2.0));
  clamp.values.pop_back();
  EXPECT_THROW(estimate_conditional_given_weights(plan, clamp), StructuralError);
}

TEST(ConditionalInput, ScaledInputsIdenticalTrialByTrial) {
  TrialPlan plan = make_plan(2, 10, "even-uniform", 5'000, 7);
  const std::vector<bool> a = trial_outcomes(plan);
  plan.input *= 0.5;
  const std::vector<bool> b = trial_outcomes(plan);
  EXPECT_EQ(a, b);
}

TEST(ConditionalInput, ArbitraryInputsAndBasisVector) {
  const TrialPlan plan = make_plan(2, 10, "even-uniform", 50'000, 8);
  Vector mu1 = Vector::Zero(10);
  mu1(3) = -1.0;
  const Vector mu2 = Vector::LinSpaced(10, -0.9, 0.2);
  EXPECT_TRUE(estimate_conditional_given_input(plan, mu1).contains(0.25));
  EXPECT_TRUE(estimate_conditional_given_input(plan, mu2).contains(0.25));
  const TrialPlan shallow = make_plan(1, 10, "even-uniform", 50'000, 8);
  Vector e1 = Vector::Zero(10);
  e1(0) = 1.0;
  EXPECT_TRUE(estimate_conditional_given_input(shallow, e1).contains(0.5));
  EXPECT_THROW(estimate_conditional_given_input(plan, Vector::Zero(10)), ValidationError);
}

TEST(Independence, Examples) {
  const ProportionEstimate a = wilson_estimate(5000, 10'000);
  EXPECT_EQ(independence_test(a, a).z_stat, 0.0);
  EXPECT_TRUE(independence_test(a, a).pass);
  EXPECT_FALSE(independence_test(wilson_estimate(50'000, 100'000), wilson_estimate(25'000, 100'000)).pass);
  EXPECT_THROW(independence_test(wilson_estimate(10, 9'999), a), ValidationError);
}

TEST(DepthSweep, RatiosAndSlope) {
  SweepTemplate tmpl;
  tmpl.input_width = tmpl.hidden_width = 16;
  tmpl.input = mixed_input(16);
  const DepthSweep s = depth_decay_sweep(tmpl, 1, 4, InitScheme::of(SchemeKind::EvenUniform), 100'000, RngSeed{9, 0});
  ASSERT_EQ(s.rows.size(), 4u);
  ASSERT_EQ(s.ratios.size(), 3u);
  EXPECT_TRUE(s.rows[0].estimate.contains(0.5));
  EXPECT_EQ(s.rows[3].target, 0.0625);
  EXPECT_TRUE(s.ratios_pass);
  EXPECT_NEAR(s.slope, -1.0, 0.05);
  EXPECT_TRUE(s.pass);

  const DepthSweep one = depth_decay_sweep(tmpl, 1, 1, InitScheme::of(SchemeKind::EvenUniform), 10'000, RngSeed{});
  EXPECT_TRUE(one.slope_pass);
  EXPECT_TRUE(one.ratios.empty());
  EXPECT_THROW(depth_decay_sweep(tmpl, 0, 2, InitScheme::of(SchemeKind::EvenUniform), 10'000, RngSeed{}),
               ValidationError);
}
