#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace evenlab {

// (master_seed, stream_id) fully determines every sample drawn under it.
struct RngSeed {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
// as easy as 1, 2, 3"). Exposed for known-answer testing.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

std::uint64_t splitmix64(std::uint64_t x);

// Derives a child stream id from a parent stream and a tag (layer index,
// pattern index, ...). Distinct tags give statistically unrelated streams.
std::uint64_t derive_stream(std::uint64_t stream_id, std::uint64_t tag);

// Stateless counter-based generator. Element `index` of the stream always
// maps to the same value regardless of draw order, which is what lets
// trials and layers be sampled in any order (or lazily) with identical
// results.
class CounterRng {
 public:
  explicit CounterRng(RngSeed seed);

  RngSeed seed() const { return seed_; }

  // Child generator over derive_stream(stream_id, tag).
  CounterRng substream(std::uint64_t tag) const;

  // Uniform on the open interval (0, 1); never 0, never 1, never 1/2.
  // `attempt` selects an independent redraw of the same element.
  double uniform(std::uint64_t index, std::uint32_t attempt = 0) const;

  // Fills out[i] = uniform(first_index + i), two elements per Philox block.
  void fill_uniform(std::uint64_t first_index, std::span<double> out) const;

  std::uint64_t bits(std::uint64_t index, std::uint32_t attempt = 0) const;

 private:
  PhiloxCounter counter_for(std::uint64_t block, std::uint32_t attempt) const;

  RngSeed seed_;
  PhiloxKey key_;
};

// Maps 64 random bits onto (0,1) as (k + 1/2) / 2^52 with k the top 52 bits.
// Both u and 1-u are exactly representable, so k and 2^52-1-k give u and 1-u
// bit for bit.
double bits_to_open_unit(std::uint64_t bits);

// Standard normal quantile function (Wichura AS241, ~1e-16 relative).
// Odd-symmetric: normal_quantile(1-p) == -normal_quantile(p) exactly for
// the dyadic p produced by bits_to_open_unit.
double normal_quantile(double p);

}  // namespace evenlab
