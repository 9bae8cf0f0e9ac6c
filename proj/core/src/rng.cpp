#include "evenlab/rng.hpp"

#include <cmath>

namespace evenlab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t stream_id, std::uint64_t tag) {
  return splitmix64(stream_id ^ splitmix64(tag + 0x632BE59BD9B4E019ull));
}

CounterRng::CounterRng(RngSeed seed)
    : seed_(seed),
      key_{static_cast<std::uint32_t>(seed.master_seed),
           static_cast<std::uint32_t>(seed.master_seed >> 32)} {}

CounterRng CounterRng::substream(std::uint64_t tag) const {
  return CounterRng(RngSeed{seed_.master_seed, derive_stream(seed_.stream_id, tag)});
}

PhiloxCounter CounterRng::counter_for(std::uint64_t block, std::uint32_t attempt) const {
  // Block indices beyond 2^32 fold their high word into the attempt slot's
  // upper half; no caller comes close to that many elements per stream.
  const auto block_lo = static_cast<std::uint32_t>(block);
  const auto block_hi = static_cast<std::uint32_t>(block >> 32);
  return {block_lo, attempt ^ (block_hi << 16) ^ (block_hi >> 16),
          static_cast<std::uint32_t>(seed_.stream_id),
          static_cast<std::uint32_t>(seed_.stream_id >> 32)};
}

std::uint64_t CounterRng::bits(std::uint64_t index, std::uint32_t attempt) const {
  const PhiloxCounter out = philox4x32_10(counter_for(index >> 1, attempt), key_);
  return (index & 1u) ? join(out[3], out[2]) : join(out[1], out[0]);
}

double CounterRng::uniform(std::uint64_t index, std::uint32_t attempt) const {
  return bits_to_open_unit(bits(index, attempt));
}

void CounterRng::fill_uniform(std::uint64_t first_index, std::span<double> out) const {
  std::size_t i = 0;
  std::uint64_t index = first_index;
  if ((index & 1u) && i < out.size()) {
    out[i++] = uniform(index++);
  }
  for (; i + 1 < out.size(); i += 2, index += 2) {
    const PhiloxCounter block = philox4x32_10(counter_for(index >> 1, 0), key_);
    out[i] = bits_to_open_unit(join(block[1], block[0]));
    out[i + 1] = bits_to_open_unit(join(block[3], block[2]));
  }
  if (i < out.size()) {
    out[i] = uniform(index);
  }
}

double bits_to_open_unit(std::uint64_t bits) {
  const auto k = static_cast<double>(bits >> 12);
  return (k + 0.5) * 0x1p-52;
}

double normal_quantile(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        ((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
             6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
           1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
         1.3314166789178437745e+2) * r + 3.3871328727963666080e+0;
    const double den =
        ((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
             3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
           5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
         4.2313330701600911252e+1) * r + 1.0;
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
             2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
           3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
         4.63033784615654529590e+0) * r + 1.42343711074968357734e+0;
    const double den =
        ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
             1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
           6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
         2.05319162663775882187e+0) * r + 1.0;
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
             1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
           2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
         5.46378491116411436990e+0) * r + 6.65790464350110377720e+0;
    const double den =
        ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
             1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
           1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
         5.99832206555887937690e-1) * r + 1.0;
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

}  // namespace evenlab
