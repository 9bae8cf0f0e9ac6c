#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "evenlab/netmodel.hpp"
#include "evenlab/rng.hpp"
#include "evenlab/stats.hpp"

namespace evenlab {

// Per-layer weight distributions, n = fan-in of the layer:
//   EvenUniform          U[-1/n, 1/n]
//   EvenTruncatedNormal  N(0, (1/(3n))^2) truncated to [-1/n, 1/n]
//   StandardUniform      U[-1/sqrt(n), 1/sqrt(n)]
//   HeNormal             N(0, 2/n) (fan-in) or N(0, 2/fan_out) (fan-out)
//   GlorotUniform        U[-sqrt(6/(n + fan_out)), +sqrt(6/(n + fan_out))]
enum class SchemeKind { EvenUniform, EvenTruncatedNormal, StandardUniform, HeNormal, GlorotUniform };
enum class FanMode { FanIn, FanOut };

bool is_even(SchemeKind kind);
std::string_view to_string(SchemeKind kind);
std::string_view to_string(FanMode mode);

// (weight layer, receiving neuron): the row of weight matrix `layer`.
struct NeuronKey {
  std::size_t layer = 0;
  std::size_t neuron = 0;

  friend auto operator<=>(const NeuronKey&, const NeuronKey&) = default;
};

struct InitScheme {
  SchemeKind kind = SchemeKind::EvenUniform;
  FanMode fan_mode = FanMode::FanIn;  // consulted by HeNormal only
  // Mixed even densities across neurons. Only valid when kind and every
  // override are even schemes.
  std::map<NeuronKey, SchemeKind> per_neuron_overrides;

  // "even-uniform", "even-truncated-normal", "standard-uniform",
  // "he-normal", "he-normal:fan-in", "he-normal:fan-out", "glorot-uniform".
  static InitScheme parse(std::string_view token);
  static InitScheme of(SchemeKind kind, FanMode mode = FanMode::FanIn);
  std::string token() const;

  friend bool operator==(const InitScheme&, const InitScheme&) = default;
};

// Throws ValidationError for overrides on a non-even scheme, non-even
// override kinds, or overrides addressing neurons outside spec.
void validate_scheme(const NetworkSpec& spec, const InitScheme& scheme);

// Distribution of one weight with the given fan-in/fan-out.
class WeightDistribution {
 public:
  WeightDistribution(SchemeKind kind, FanMode mode, std::size_t fan_in, std::size_t fan_out);

  SchemeKind kind() const { return kind_; }
  // Half-width for uniform kinds, sigma for normal kinds.
  double scale() const { return scale_; }
  // Truncation bound (EvenTruncatedNormal) or support half-width (uniform);
  // infinity for HeNormal.
  double bound() const { return bound_; }

  // Maps the uniform variate u = rng.uniform(index) to a weight. The
  // truncated normal redraws with attempt = 1, 2, ... on rejection.
  double transform(double u, const CounterRng& rng, std::uint64_t index) const;
  double draw(const CounterRng& rng, std::uint64_t index) const;

 private:
  SchemeKind kind_;
  double scale_;
  double bound_;
};

inline constexpr std::uint32_t kTruncationRetryCap = 100;

// Generator for weight layer `layer` under `seed`: a substream derived
// from the seed's stream id, so layers are independent and order-free.
CounterRng layer_rng(const RngSeed& seed, std::size_t layer);

// Row `row` of weight layer `layer` exactly as sample_weights produces it.
void sample_row(const NetworkSpec& spec, const InitScheme& scheme, const RngSeed& seed,
                std::size_t layer, std::size_t row, std::span<double> out);

// Draws every weight independently per its layer distribution. Identical
// (spec, scheme, seed) always yields bit-identical weights.
WeightSet sample_weights(const NetworkSpec& spec, const InitScheme& scheme, const RngSeed& seed);

struct IntervalSummary {
  SchemeKind kind = SchemeKind::EvenUniform;
  FanMode fan_mode = FanMode::FanIn;
  std::size_t fan_in = 0;
  std::size_t fan_out = 0;
  double lo = 0.0;
  double hi = 0.0;
  // Probability mass inside [lo, hi]: 1 for bounded schemes, 0.9973 for the
  // He three-sigma interval.
  double coverage = 1.0;
};

inline constexpr double kThreeSigmaCoverage = 0.9973;

// Exact support for bounded schemes, the three-sigma interval for He.
IntervalSummary support_interval(const InitScheme& scheme, std::size_t fan_in, std::size_t fan_out = 0);

struct ContainmentReport {
  std::size_t fan_in = 0;
  IntervalSummary even;
  IntervalSummary standard;
  IntervalSummary he;
  bool contained = false;  // even inside standard and inside He 3-sigma
};

ContainmentReport check_containment(std::size_t fan_in);

struct SymmetryAudit {
  SchemeKind kind = SchemeKind::EvenUniform;
  std::size_t fan_in = 0;
  std::uint64_t draws = 0;
  double mean_estimate = 0.0;
  double mean_std_error = 0.0;
  ProportionEstimate sign_balance;  // P(w > 0)
  bool mean_brackets_zero = false;  // |mean| <= z * standard error
  bool sign_brackets_half = false;
  bool pass = false;
};

inline constexpr std::uint64_t kMinSymmetryDraws = 10'000;

// Throws ValidationError for draws < kMinSymmetryDraws. Glorot and He
// fan-out use fan_out = fan_in.
SymmetryAudit symmetry_audit(const InitScheme& scheme, std::size_t fan_in, std::uint64_t draws,
                             const RngSeed& seed, double z = kDefaultZ);

}  // namespace evenlab
