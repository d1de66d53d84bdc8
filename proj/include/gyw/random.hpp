#ifndef GYW_RANDOM_HPP
#define GYW_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gyw {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed for a stream identified by `keys` under `base`. Used so that
/// replicate r draws the same numbers regardless of which worker runs it.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k));
  return h;
}

}  // namespace gyw

#endif  // GYW_RANDOM_HPP
