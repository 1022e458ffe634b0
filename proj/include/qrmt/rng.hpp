#pragma once

#include <cstdint>
#include <limits>

namespace qrmt {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of a seed and up to two coordinates.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t i, std::uint64_t j = 0) {
  std::uint64_t h = mix64(seed ^ 0x6A09E667F3BCC908ULL);
  h = mix64(h ^ (i * 0xD1B54A32D192ED03ULL));
  h = mix64(h ^ (j * 0x8CB92BA72F3D8DD7ULL));
  return h;
}

/// Counter-based stream: the k-th output is mix64(key + k * golden). Satisfies
/// UniformRandomBitGenerator so it plugs into <random> distributions.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterStream(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    return mix64(key_ + (counter_++) * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform double in (0, 1], 53 bits.
  double uniform_open0() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qrmt
