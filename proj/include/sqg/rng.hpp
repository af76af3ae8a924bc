#ifndef SQG_RNG_HPP
#define SQG_RNG_HPP

#include <cstdint>

namespace sqg {

/// SplitMix64: the 64-bit recurrence state += 0x9E3779B97F4A7C15 followed
/// by the two xor-multiply finalization rounds (0xBF58476D1CE4E5B9,
/// 0x94D049BB133111EB). Fixed constants keep seeded runs bit-reproducible
/// across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [a, b).
  double next_uniform(double a, double b) { return a + (b - a) * next_unit(); }

 private:
  uint64_t state_;
};

}  // namespace sqg

#endif  // SQG_RNG_HPP
