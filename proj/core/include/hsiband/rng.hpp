#ifndef HSIBAND_RNG_HPP
#define HSIBAND_RNG_HPP

#include <cmath>
#include <cstdint>

// Counter-based random streams. Every consumer derives its own stream from
// (seed, key...) so results do not depend on evaluation order and are
// identical across platforms.

namespace hsiband::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ b);
}

inline double to_unit(std::uint64_t x) {
  // 53 mantissa bits -> [0, 1)
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

/// Stateful stream over the splitmix64 counter sequence.
class Stream {
public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}
  Stream(std::uint64_t seed, std::uint64_t key) : state_(mix(seed, key)) {}

  std::uint64_t next_u64() { return splitmix64(state_++); }
  double next_unit() { return to_unit(next_u64()); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

  /// Standard normal via Box-Muller (cosine branch).
  double next_gauss() {
    double u1 = next_unit();
    double u2 = next_unit();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

private:
  std::uint64_t state_;
};

/// Position-keyed standard normal draw; independent of evaluation order.
inline double gauss_at(std::uint64_t seed, std::uint64_t key_a, std::uint64_t key_b) {
  Stream s(mix(seed, key_a), key_b);
  return s.next_gauss();
}

}  // namespace hsiband::rng

#endif
