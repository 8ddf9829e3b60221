#pragma once

// Seedable, platform-independent uniform source.
//
// The engine is std::mt19937_64 seeded through std::seed_seq from the four
// 32-bit halves of (seed, stream); both algorithms are fully specified by the
// standard, so a given (seed, stream) reproduces the same sequence everywhere.

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dtsp {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Folds a list of indices into one stream identifier:
///   h = 0; for each k: h = mix64(h ^ mix64(k)).
constexpr std::uint64_t derive_stream(std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = 0;
  for (auto k : keys) h = mix64(h ^ mix64(k));
  return h;
}

class RngState {
 public:
  RngState(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Uniform deviate in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace dtsp
