#pragma once

#include <cstdint>
#include <initializer_list>

namespace entnet::rng {

// SplitMix64 finalizer. Counter-based draws are keyed by hashing the index
// tuple, so any draw can be reproduced without generator state.
constexpr std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t key(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6A09E667F3BCC909ull;
  for (std::uint64_t w : words) h = mix(h ^ mix(w));
  return h;
}

// Uniform double in [0, 1) from a key; 53 mantissa bits.
inline double uniform01(std::uint64_t k) {
  return static_cast<double>(mix(k) >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t k, double lo, double hi) {
  return lo + (hi - lo) * uniform01(k);
}

}  // namespace entnet::rng
