#include <benchmark/benchmark.h>

#include <vector>

#include "evenlab/init.hpp"
#include "evenlab/landscape.hpp"
#include "evenlab/netmodel.hpp"
#include "evenlab/pathstats.hpp"
#include "evenlab/rng.hpp"

using namespace evenlab;

namespace {

void BM_FillUniform(benchmark::State& state) {
  const CounterRng rng(RngSeed{1, 0});
  std::vector<double> buf(static_cast<std::size_t>(state.range(0)));
  std::uint64_t offset = 0;
  for (auto _ : state) {
    rng.fill_uniform(offset, buf);
    offset += buf.size();
    benchmark::DoNotOptimize(buf.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FillUniform)->Arg(1 << 10)->Arg(1 << 16);

void BM_SampleWeights(benchmark::State& state) {
  const auto w = static_cast<std::size_t>(state.range(0));
  const NetworkSpec spec({w, w, w, 1});
  const InitScheme scheme = InitScheme::parse("even-uniform");
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_weights(spec, scheme, RngSeed{1, stream++}));
}
BENCHMARK(BM_SampleWeights)->Arg(64)->Arg(256);

void BM_ForwardRelu(benchmark::State& state) {
  const auto w = static_cast<std::size_t>(state.range(0));
  const NetworkSpec spec({w, w, w, 1});
  const WeightSet weights = sample_weights(spec, InitScheme::parse("even-uniform"), RngSeed{1, 0});
  const Vector x = Vector::Constant(static_cast<Eigen::Index>(w), 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(forward_relu(spec, weights, x));
}
BENCHMARK(BM_ForwardRelu)->Arg(64)->Arg(256);

// One Monte Carlo trial of the lazy kernel, with and without clamps.
void BM_TrialPathActive(benchmark::State& state) {
  const auto w = static_cast<std::size_t>(state.range(0));
  const NetworkSpec spec({w, w, w, 1});
  const RowSampler sampler = scheme_sampler(spec, InitScheme::parse("even-uniform"));
  const Vector x = Vector::Constant(static_cast<Eigen::Index>(w), 0.5);
  const PathId path{0, {0, 0, 0}};
  const ClampSpec clamp = ClampSpec::extreme(spec);
  const ClampSpec* c = state.range(1) != 0 ? &clamp : nullptr;
  std::uint64_t t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(trial_path_active(spec, x, path, RngSeed{1, t++}, sampler, c));
}
BENCHMARK(BM_TrialPathActive)->Args({64, 0})->Args({64, 1})->Args({256, 1});

Dataset bench_data(const NetworkSpec& spec) {
  const CounterRng rng(RngSeed{3, 0});
  Matrix x(static_cast<Eigen::Index>(spec.input_width()), 8);
  Matrix y(static_cast<Eigen::Index>(spec.output_width()), 8);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 2.0 * rng.uniform(static_cast<std::uint64_t>(i)) - 1.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = 2.0 * rng.uniform(1000 + static_cast<std::uint64_t>(i)) - 1.0;
  return Dataset(spec, x, y);
}

void BM_Gradient(benchmark::State& state) {
  const NetworkSpec spec({3, 4, 4, 3});
  const Dataset data = bench_data(spec);
  const LossConfig cfg = LossConfig::for_spec(spec);
  const WeightSet w = sample_weights(spec, InitScheme::parse("standard-uniform"), RngSeed{2, 0});
  for (auto _ : state) benchmark::DoNotOptimize(gradient(spec, w, data, cfg));
}
BENCHMARK(BM_Gradient);

void BM_ClassifyPoint(benchmark::State& state) {
  const NetworkSpec spec({3, 2, 3});
  const Dataset data = bench_data(spec);
  const LossConfig cfg = LossConfig::for_spec(spec);
  const WeightSet w = zero_weights(spec);
  for (auto _ : state) benchmark::DoNotOptimize(classify_point(spec, w, data, cfg));
}
BENCHMARK(BM_ClassifyPoint);

void BM_MonteCarloLoss(benchmark::State& state) {
  const NetworkSpec spec({3, 2, 2, 1});
  const Dataset data = bench_data(spec);
  const LossConfig cfg = LossConfig::for_spec(spec, LossVariant::MonteCarlo);
  const WeightSet w = sample_weights(spec, InitScheme::parse("standard-uniform"), RngSeed{2, 0});
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_loss(spec, w, data, cfg, 1000, RngSeed{4, 0}));
}
BENCHMARK(BM_MonteCarloLoss);

}  // namespace

BENCHMARK_MAIN();
