#pragma once

#include <cmath>
#include <cstdint>

namespace drpolicy {

// Deterministic xoshiro256++ generator with splitmix64 seeding.
//
// The simulation harness derives one independent stream per replication from
// (master seed, tag...) so results do not depend on execution order or worker
// count. We avoid std::*_distribution on purpose: their output is
// implementation-defined, and the experiment contract is bit-reproducible
// output for a given (config, seed).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; caches the second variate.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  std::uint64_t state_[4];
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Derives a child seed from a master seed and a sequence of tags
// (e.g. form index, sample-size index, replication index).
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag) {
  std::uint64_t x = master ^ (0x9e3779b97f4a7c15ULL + tag * 0xd1b54a32d192ed03ULL);
  return Rng::splitmix64(x);
}

template <typename... Tags>
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t tag, Tags... rest) {
  return substream_seed(substream_seed(master, tag), static_cast<std::uint64_t>(rest)...);
}

}  // namespace drpolicy
