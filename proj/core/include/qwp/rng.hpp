#pragma once

#include <cstdint>

namespace qwp {

// SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
// generators", OOPSLA 2014).  64-bit state advanced by the golden-ratio
// increment, finalized with the murmur-style mixer.  Chosen because the
// algorithm is fully specified by these two constants, so seeded outcome
// sequences are reproducible across platforms and implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform double in [0, 1) using the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Stateless finalizer, used to derive independent per-trial seeds.
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Seed for trial `index` of a run seeded with `seed`.  Trials seeded this
  // way can be evaluated in any order with identical results.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
    return mix(seed + 0x9E3779B97F4A7C15ULL * (index + 1));
  }

 private:
  std::uint64_t state_;
};

}  // namespace qwp
