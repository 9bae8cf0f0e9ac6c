#include "evenlab/init.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "evenlab/errors.hpp"

namespace evenlab {

bool is_even(SchemeKind kind) {
  return kind == SchemeKind::EvenUniform || kind == SchemeKind::EvenTruncatedNormal;
}

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::EvenUniform: return "even-uniform";
    case SchemeKind::EvenTruncatedNormal: return "even-truncated-normal";
    case SchemeKind::StandardUniform: return "standard-uniform";
    case SchemeKind::HeNormal: return "he-normal";
    case SchemeKind::GlorotUniform: return "glorot-uniform";
  }
  return "unknown";
}

std::string_view to_string(FanMode mode) { return mode == FanMode::FanIn ? "fan-in" : "fan-out"; }

InitScheme InitScheme::parse(std::string_view token) {
  InitScheme scheme;
  std::string_view base = token;
  std::string_view suffix;
  if (const auto colon = token.find(':'); colon != std::string_view::npos) {
    base = token.substr(0, colon);
    suffix = token.substr(colon + 1);
  }
  if (base == "even-uniform") {
    scheme.kind = SchemeKind::EvenUniform;
  } else if (base == "even-truncated-normal") {
    scheme.kind = SchemeKind::EvenTruncatedNormal;
  } else if (base == "standard-uniform") {
    scheme.kind = SchemeKind::StandardUniform;
  } else if (base == "he-normal") {
    scheme.kind = SchemeKind::HeNormal;
  } else if (base == "glorot-uniform") {
    scheme.kind = SchemeKind::GlorotUniform;
  } else {
    throw_validation("unknown scheme token '" + std::string(token) + "'");
  }
  if (!suffix.empty() || token.find(':') != std::string_view::npos) {
    if (scheme.kind != SchemeKind::HeNormal) {
      throw_validation("scheme '" + std::string(base) + "' takes no fan mode");
    }
    if (suffix == "fan-in") {
      scheme.fan_mode = FanMode::FanIn;
    } else if (suffix == "fan-out") {
      scheme.fan_mode = FanMode::FanOut;
    } else {
      throw_validation("unknown fan mode '" + std::string(suffix) + "'");
    }
  }
  return scheme;
}

InitScheme InitScheme::of(SchemeKind kind, FanMode mode) {
  InitScheme scheme;
  scheme.kind = kind;
  scheme.fan_mode = mode;
  return scheme;
}

std::string InitScheme::token() const {
  std::string out(to_string(kind));
  if (kind == SchemeKind::HeNormal) {
    out += ':';
    out += to_string(fan_mode);
  }
  return out;
}

void validate_scheme(const NetworkSpec& spec, const InitScheme& scheme) {
  if (scheme.per_neuron_overrides.empty()) return;
  if (!is_even(scheme.kind)) {
    throw_validation("per-neuron overrides require an even scheme, got '" + scheme.token() + "'");
  }
  for (const auto& [key, kind] : scheme.per_neuron_overrides) {
    if (!is_even(kind)) {
      throw_validation("per-neuron override kinds must be even schemes, got '" +
                       std::string(to_string(kind)) + "'");
    }
    if (key.layer >= spec.layer_count() || key.neuron >= spec.fan_out(key.layer)) {
      throw_validation("per-neuron override (" + std::to_string(key.layer) + ", " +
                       std::to_string(key.neuron) + ") addresses no neuron of the network");
    }
  }
}

WeightDistribution::WeightDistribution(SchemeKind kind, FanMode mode, std::size_t fan_in,
                                       std::size_t fan_out)
    : kind_(kind), scale_(0.0), bound_(0.0) {
  if (fan_in == 0) throw_validation("fan-in must be at least 1");
  const double n = static_cast<double>(fan_in);
  switch (kind) {
    case SchemeKind::EvenUniform:
      scale_ = bound_ = 1.0 / n;
      break;
    case SchemeKind::EvenTruncatedNormal:
      bound_ = 1.0 / n;
      scale_ = 1.0 / (3.0 * n);
      break;
    case SchemeKind::StandardUniform:
      scale_ = bound_ = 1.0 / std::sqrt(n);
      break;
    case SchemeKind::HeNormal: {
      const std::size_t fan = mode == FanMode::FanIn ? fan_in : fan_out;
      if (fan == 0) throw_validation("he-normal:fan-out needs fan-out >= 1");
      scale_ = std::sqrt(2.0 / static_cast<double>(fan));
      bound_ = std::numeric_limits<double>::infinity();
      break;
    }
    case SchemeKind::GlorotUniform:
      if (fan_out == 0) throw_validation("glorot-uniform needs fan-out >= 1");
      scale_ = bound_ = std::sqrt(6.0) / std::sqrt(n + static_cast<double>(fan_out));
      break;
  }
}

double WeightDistribution::transform(double u, const CounterRng& rng, std::uint64_t index) const {
  switch (kind_) {
    case SchemeKind::EvenUniform:
    case SchemeKind::StandardUniform:
    case SchemeKind::GlorotUniform:
      return scale_ * (2.0 * u - 1.0);
    case SchemeKind::HeNormal:
      return scale_ * normal_quantile(u);
    case SchemeKind::EvenTruncatedNormal: {
      double w = scale_ * normal_quantile(u);
      for (std::uint32_t attempt = 1; std::fabs(w) > bound_; ++attempt) {
        if (attempt >= kTruncationRetryCap) {
          throw_capacity("truncated normal: rejection cap of " + std::to_string(kTruncationRetryCap) +
                         " draws exhausted");
        }
        w = scale_ * normal_quantile(rng.uniform(index, attempt));
      }
      return w;
    }
  }
  return 0.0;
}

double WeightDistribution::draw(const CounterRng& rng, std::uint64_t index) const {
  return transform(rng.uniform(index), rng, index);
}

CounterRng layer_rng(const RngSeed& seed, std::size_t layer) {
  return CounterRng(seed).substream(layer);
}

namespace {

void fill_row(const NetworkSpec& spec, const InitScheme& scheme, const CounterRng& rng,
              std::size_t layer, std::size_t row, std::span<double> out) {
  const std::size_t fan_in = spec.fan_in(layer);
  SchemeKind kind = scheme.kind;
  if (!scheme.per_neuron_overrides.empty()) {
    if (auto it = scheme.per_neuron_overrides.find(NeuronKey{layer, row});
        it != scheme.per_neuron_overrides.end()) {
      kind = it->second;
    }
  }
  const WeightDistribution dist(kind, scheme.fan_mode, fan_in, spec.fan_out(layer));
  const std::uint64_t first = static_cast<std::uint64_t>(row) * fan_in;
  rng.fill_uniform(first, out);
  for (std::size_t j = 0; j < fan_in; ++j) out[j] = dist.transform(out[j], rng, first + j);
}

}  // namespace

void sample_row(const NetworkSpec& spec, const InitScheme& scheme, const RngSeed& seed,
                std::size_t layer, std::size_t row, std::span<double> out) {
  if (layer >= spec.layer_count() || row >= spec.fan_out(layer)) {
    throw_structural("sample_row: (layer " + std::to_string(layer) + ", row " + std::to_string(row) +
                     ") outside the network");
  }
  if (out.size() != spec.fan_in(layer)) {
    throw_structural("sample_row: output span has " + std::to_string(out.size()) + " slots, expected " +
                     std::to_string(spec.fan_in(layer)));
  }
  fill_row(spec, scheme, layer_rng(seed, layer), layer, row, out);
}

WeightSet sample_weights(const NetworkSpec& spec, const InitScheme& scheme, const RngSeed& seed) {
  validate_scheme(spec, scheme);
  WeightSet w = zero_weights(spec);
  std::vector<double> row_buffer;
  for (std::size_t k = 0; k < spec.layer_count(); ++k) {
    const CounterRng rng = layer_rng(seed, k);
    row_buffer.resize(spec.fan_in(k));
    for (std::size_t l = 0; l < spec.fan_out(k); ++l) {
      fill_row(spec, scheme, rng, k, l, row_buffer);
      for (std::size_t j = 0; j < row_buffer.size(); ++j) {
        w.layers[k](static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j)) = row_buffer[j];
      }
    }
  }
  return w;
}

IntervalSummary support_interval(const InitScheme& scheme, std::size_t fan_in, std::size_t fan_out) {
  const WeightDistribution dist(scheme.kind, scheme.fan_mode, fan_in, fan_out);
  IntervalSummary s;
  s.kind = scheme.kind;
  s.fan_mode = scheme.fan_mode;
  s.fan_in = fan_in;
  s.fan_out = fan_out;
  if (scheme.kind == SchemeKind::HeNormal) {
    s.hi = 3.0 * dist.scale();
    s.coverage = kThreeSigmaCoverage;
  } else {
    s.hi = dist.bound();
    s.coverage = 1.0;
  }
  s.lo = -s.hi;
  return s;
}

ContainmentReport check_containment(std::size_t fan_in) {
  if (fan_in == 0) throw_validation("check_containment: fan-in must be at least 1");
  ContainmentReport r;
  r.fan_in = fan_in;
  r.even = support_interval(InitScheme::of(SchemeKind::EvenUniform), fan_in);
  r.standard = support_interval(InitScheme::of(SchemeKind::StandardUniform), fan_in);
  r.he = support_interval(InitScheme::of(SchemeKind::HeNormal, FanMode::FanIn), fan_in);
  const auto inside = [](const IntervalSummary& inner, const IntervalSummary& outer) {
    return outer.lo <= inner.lo && inner.hi <= outer.hi;
  };
  r.contained = inside(r.even, r.standard) && inside(r.even, r.he);
  return r;
}

SymmetryAudit symmetry_audit(const InitScheme& scheme, std::size_t fan_in, std::uint64_t draws,
                             const RngSeed& seed, double z) {
  if (draws < kMinSymmetryDraws) {
    throw_validation("symmetry_audit: need at least " + std::to_string(kMinSymmetryDraws) + " draws");
  }
  const WeightDistribution dist(scheme.kind, scheme.fan_mode, fan_in, fan_in);
  const CounterRng rng(seed);
  RunningMoments moments;
  std::uint64_t positive = 0;
  for (std::uint64_t i = 0; i < draws; ++i) {
    const double w = dist.draw(rng, i);
    moments.push(w);
    if (w > 0.0) ++positive;
  }

  SymmetryAudit audit;
  audit.kind = scheme.kind;
  audit.fan_in = fan_in;
  audit.draws = draws;
  audit.mean_estimate = moments.mean();
  audit.mean_std_error = moments.standard_error();
  audit.sign_balance = wilson_estimate(positive, draws, z);
  audit.mean_brackets_zero = std::fabs(audit.mean_estimate) <= z * audit.mean_std_error;
  audit.sign_brackets_half = audit.sign_balance.contains(0.5);
  audit.pass = audit.mean_brackets_zero && audit.sign_brackets_half;
  return audit;
}

}  // namespace evenlab
