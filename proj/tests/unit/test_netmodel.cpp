#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "evenlab/errors.hpp"
#include "evenlab/init.hpp"
#include "evenlab/netmodel.hpp"
#include "oracles.hpp"

using namespace evenlab;

namespace {

WeightSet random_weights(const NetworkSpec& spec, std::uint64_t seed) {
  return sample_weights(spec, InitScheme::of(SchemeKind::StandardUniform), RngSeed{seed, 0});
}

Vector random_input(std::size_t n, std::uint64_t seed) {
  const CounterRng rng(RngSeed{seed, 777});
  Vector x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = 2.0 * rng.uniform(i) - 1.0;
  return x;
}

// Widths from a seed: depth 1..3, widths 1..5.
NetworkSpec random_spec(std::uint64_t seed) {
  const CounterRng rng(RngSeed{seed, 31});
  const std::size_t hidden = 1 + static_cast<std::size_t>(rng.uniform(0) * 3.0);
  std::vector<std::size_t> widths;
  for (std::size_t k = 0; k < hidden + 2; ++k) widths.push_back(1 + static_cast<std::size_t>(rng.uniform(k + 1) * 5.0));
  return NetworkSpec(widths);
}

}  // namespace

TEST(NetworkSpec, Validation) {
  EXPECT_THROW(NetworkSpec({3, 2}), ValidationError);
  EXPECT_THROW(NetworkSpec({3, 0, 1}), ValidationError);
  EXPECT_THROW(NetworkSpec({3, 2, 1}, 0.0), ValidationError);
  EXPECT_THROW(NetworkSpec({3, 2, 1}, 1.0, -1.0), ValidationError);
  const NetworkSpec s({3, 4, 5, 2});
  EXPECT_EQ(s.hidden_depth(), 2u);
  EXPECT_EQ(s.layer_count(), 3u);
  EXPECT_EQ(s.parameter_count(), 12u + 20u + 10u);
  EXPECT_EQ(s.path_count(), 60u);
}

TEST(Forward, ZeroWeights) {
  const NetworkSpec s({3, 4, 2});
  const ForwardResult r = forward_relu(s, zero_weights(s), Vector::Ones(3));
  EXPECT_TRUE(r.output.isZero(0.0));
  for (bool a : r.record.unit_active[0]) EXPECT_FALSE(a);
}

TEST(Forward, HandArithmetic) {
  const NetworkSpec s({1, 1, 1});
  WeightSet w = zero_weights(s);
  w.layers[0](0, 0) = 0.5;
  w.layers[1](0, 0) = 2.0;
  const ForwardResult r = forward_relu(s, w, Vector::Ones(1));
  EXPECT_EQ(r.output(0), 1.0);
  EXPECT_TRUE(r.record.unit_active[0][0]);
  EXPECT_EQ(r.record.unit_net_inputs[0](0), 0.5);
}

TEST(Forward, MatchesDenseOracle) {
  const NetworkSpec s({3, 4, 2});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const WeightSet w = random_weights(s, seed);
    const Vector x = random_input(3, seed);
    const Vector got = forward_relu(s, w, x).output;
    const Vector want = oracle::dense_forward(w.layers, x);
    for (Eigen::Index j = 0; j < got.size(); ++j) {
      EXPECT_NEAR(got(j), want(j), 1e-12 * std::max(1.0, std::fabs(want(j))));
    }
  }
}

TEST(Forward, Errors) {
  const NetworkSpec s({3, 4, 2});
  const WeightSet w = zero_weights(s);
  EXPECT_THROW(forward_relu(s, w, Vector::Ones(2)), StructuralError);
  Vector bad = Vector::Ones(3);
  bad(1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(forward_relu(s, w, bad), ValidationError);
  EXPECT_THROW(forward_relu(s, w, Vector::Constant(3, 1.5)), ValidationError);
  WeightSet wrong = w;
  wrong.layers[1] = Matrix::Zero(2, 3);
  EXPECT_THROW(forward_relu(s, wrong, Vector::Ones(3)), StructuralError);
  WeightSet inf = w;
  inf.layers[0](0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate_weights(s, inf), ValidationError);
}

TEST(EnumeratePaths, CountsAndOrder) {
  EXPECT_EQ(enumerate_paths(NetworkSpec({2, 3, 1}), 0).size(), 6u);
  EXPECT_EQ(enumerate_paths(NetworkSpec({3, 4, 5, 2}), 1).size(), 60u);
  const auto single = enumerate_paths(NetworkSpec({1, 1, 1}), 0);
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].neuron_chain, (std::vector<std::size_t>{0, 0}));

  const auto paths = enumerate_paths(NetworkSpec({2, 3, 2, 1}), 0);
  ASSERT_EQ(paths.size(), 12u);
  for (std::size_t i = 1; i < paths.size(); ++i) {
    EXPECT_LT(paths[i - 1].neuron_chain, paths[i].neuron_chain);
  }
  EXPECT_THROW(enumerate_paths(NetworkSpec({2, 3, 1}), 1), StructuralError);
}

TEST(EnumeratePaths, CapacityError) {
  const NetworkSpec big({100, 100, 101, 1});
  try {
    enumerate_paths(big, 0);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_NE(std::string(e.what()).find("1010000"), std::string::npos) << e.what();
  }
}

TEST(PathActivity, StrictInequality) {
  const NetworkSpec s({2, 2, 1});
  WeightSet w = zero_weights(s);
  w.layers[0] << 1.0, 0.0,   // unit 0: U = x0
      1.0, -1.0;             // unit 1: U = x0 - x1
  w.layers[1] << 1.0, 1.0;
  const ForwardResult r = forward_relu(s, w, Vector::Ones(2));
  EXPECT_TRUE(path_is_active(r.record, PathId{0, {0, 0}}));
  EXPECT_TRUE(path_is_active(r.record, PathId{0, {1, 0}}));
  EXPECT_FALSE(path_is_active(r.record, PathId{0, {0, 1}}));  // U = 0 exactly
  EXPECT_EQ(r.record.unit_net_inputs[0](1), 0.0);
}

TEST(PathActivity, BruteForceRecount) {
  const NetworkSpec s({3, 4, 3, 2});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const WeightSet w = random_weights(s, seed);
    const ForwardResult r = forward_relu(s, w, random_input(3, seed));
    const auto paths = enumerate_paths(s, 0);
    const auto act = path_activity(r.record, paths);
    std::size_t active = 0;
    for (bool a : act) active += a;
    std::size_t l1 = 0, l2 = 0;
    for (bool a : r.record.unit_active[0]) l1 += a;
    for (bool a : r.record.unit_active[1]) l2 += a;
    EXPECT_EQ(active, 3 * l1 * l2);
  }
}

TEST(PathSum, TrivialCases) {
  const NetworkSpec s({1, 1, 1}, 2.0, 3.0);
  WeightSet w = zero_weights(s);
  w.layers[0](0, 0) = 0.5;
  w.layers[1](0, 0) = 1.0;
  EXPECT_EQ(path_sum_output(s, w, Vector::Constant(1, 3.0), {true}, 0), 3.0);
  EXPECT_EQ(path_sum_output(s, w, Vector::Constant(1, 3.0), {false}, 0), 0.0);
  EXPECT_THROW(path_sum_output(s, w, Vector::Constant(1, 3.0), {true, true}, 0), StructuralError);
}

TEST(PathSum, DecompositionIdentity) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const NetworkSpec s = random_spec(seed);
    const WeightSet w = random_weights(s, seed);
    const Vector x = random_input(s.input_width(), seed);
    const ForwardResult r = forward_relu(s, w, x);
    for (std::size_t j = 0; j < s.output_width(); ++j) {
      const auto paths = enumerate_paths(s, j);
      const double sum = path_sum_output(s, w, x, path_activity(r.record, paths), j);
      const double ref = oracle::relu_path_sum(w.layers, x, j, 1.0);
      const double scale = std::max(1e-300, std::fabs(r.output(static_cast<Eigen::Index>(j))));
      EXPECT_LE(std::fabs(sum - r.output(static_cast<Eigen::Index>(j))), 1e-9 * scale + 1e-15) << seed;
      EXPECT_NEAR(sum, ref, 1e-12 * std::max(1.0, std::fabs(ref)));
    }
  }
}

TEST(Properties, PositiveHomogeneity) {
  const NetworkSpec s({4, 6, 5, 2});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const WeightSet w = random_weights(s, seed);
    const Vector x = random_input(4, seed);
    const auto base = forward_relu(s, w, x).record.unit_active;
    for (double c : {0.5, 0.01, 1e-6}) EXPECT_EQ(forward_relu(s, w, c * x).record.unit_active, base);
  }
}

TEST(Properties, MonotoneGating) {
  const NetworkSpec s({3, 4, 4, 1});
  const WeightSet w = random_weights(s, 5);
  const ForwardResult r = forward_relu(s, w, random_input(3, 5));
  const auto paths = enumerate_paths(s, 0);
  const auto before = path_activity(r.record, paths);
  for (std::size_t k = 0; k < r.record.unit_active.size(); ++k) {
    for (std::size_t l = 0; l < r.record.unit_active[k].size(); ++l) {
      ActivationRecord off = r.record;
      off.unit_active[k][l] = false;
      const auto after = path_activity(off, paths);
      for (std::size_t p = 0; p < paths.size(); ++p) EXPECT_LE(after[p], before[p]);
    }
  }
}

TEST(Dataset, RejectsZeroColumnAndShapes) {
  const NetworkSpec s({2, 2, 1});
  Matrix x(2, 2);
  x << 1.0, 0.0, 0.5, 0.0;
  EXPECT_THROW(Dataset(s, x, Matrix::Zero(1, 2)), ValidationError);
  EXPECT_THROW(Dataset(s, Matrix::Ones(2, 2), Matrix::Zero(2, 2)), StructuralError);
  EXPECT_THROW(Dataset(s, Matrix::Constant(2, 1, 2.0), Matrix::Zero(1, 1)), ValidationError);
  EXPECT_EQ(Dataset(s, Matrix::Ones(2, 3), Matrix::Zero(1, 3)).count(), 3u);
}
