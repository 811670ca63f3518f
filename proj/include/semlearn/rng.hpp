// Counter-seeded xoshiro256** streams. Every sampled node gets its own
// stream derived from (seed, index), so graph sampling is order-independent
// and trivially parallel, and results are identical across platforms
// (std:: distributions are not).
#pragma once

#include <cmath>
#include <cstdint>

namespace semlearn {

constexpr std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
  }

  // Independent stream for (seed, index); index may be a node id, a trial
  // number, etc. A salt separates index spaces that share one seed.
  static Rng stream(std::uint64_t seed, std::uint64_t index,
                    std::uint64_t salt = 0) {
    std::uint64_t sm = seed;
    std::uint64_t a = splitmix64(sm);
    sm = a ^ (index * 0x9e3779b97f4a7c15ull) ^ (salt << 1);
    Rng r(0);
    for (auto& w : r.s_) w = splitmix64(sm);
    return r;
  }

  std::uint64_t next_u64() {  // xoshiro256**
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, bound). Lemire's multiply-reject, unbiased.
  std::uint32_t next_below(std::uint32_t bound) {
    std::uint32_t x = static_cast<std::uint32_t>(next_u64() >> 32);
    std::uint64_t m = static_cast<std::uint64_t>(x) * bound;
    auto lo = static_cast<std::uint32_t>(m);
    if (lo < bound) {
      std::uint32_t t = (0u - bound) % bound;
      while (lo < t) {
        x = static_cast<std::uint32_t>(next_u64() >> 32);
        m = static_cast<std::uint64_t>(x) * bound;
        lo = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  double next_double() {  // uniform in [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double prob) { return next_double() < prob; }

  // Knuth's product method; means above 30 are split so exp(-mean) never
  // underflows. O(mean) per draw, fine for the degree scales used here.
  std::uint32_t poisson(double mean) {
    std::uint32_t total = 0;
    while (mean > 30.0) {
      total += poisson_small(30.0);
      mean -= 30.0;
    }
    return total + poisson_small(mean);
  }

 private:
  std::uint32_t poisson_small(double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    std::uint32_t k = 0;
    double prod = next_double();
    while (prod > limit) {
      ++k;
      prod *= next_double();
    }
    return k;
  }

  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

}  // namespace semlearn
