#pragma once

#include <cstdint>
#include <random>

namespace nnim::rng {

// Counter-based streams: every random draw is a pure function of
// (seed, stream tag, counters...), so results do not depend on iteration
// order or thread count.

// Stream tags keep independent uses of the same seed from colliding.
enum Stream : std::uint64_t {
  kOpinionDraw = 1,   // Bernoulli opinion resampling, counters (u, i, t)
  kLshTree = 2,       // hyperplane directions, counters (tree, node)
  kLshBackfill = 3,   // candidate backfill, counters (u)
  kLabelPropOrder = 4,// sweep order, counters (sweep)
  kLabelPropCoin = 5, // majority tie coins, counters (u, i, sweep)
  kRandomHk = 6,      // ball subsampling, counters (u, t)
  kInstance = 7,      // synthetic instance generation, counters (trial)
  kStep = 8           // per-step engine derivation, counters (t)
};

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer (Steele, Lea, Flood).
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t hash(std::uint64_t seed, std::uint64_t w0,
                          std::uint64_t w1 = 0, std::uint64_t w2 = 0,
                          std::uint64_t w3 = 0) {
  std::uint64_t x = seed;
  x = mix64(x + kGolden + w0);
  x = mix64(x + kGolden + w1);
  x = mix64(x + kGolden + w2);
  x = mix64(x + kGolden + w3);
  return x;
}

/// Uniform double in [0, 1) from one counter lookup.
inline double uniform01(std::uint64_t seed, std::uint64_t w0,
                        std::uint64_t w1 = 0, std::uint64_t w2 = 0,
                        std::uint64_t w3 = 0) {
  return static_cast<double>(hash(seed, w0, w1, w2, w3) >> 11) *
         0x1.0p-53;
}

/// Bernoulli(p). p=0 never fires, p=1 always fires.
inline bool bernoulli(double p, std::uint64_t seed, std::uint64_t w0,
                      std::uint64_t w1 = 0, std::uint64_t w2 = 0,
                      std::uint64_t w3 = 0) {
  return uniform01(seed, w0, w1, w2, w3) < p;
}

/// Dedicated engine for algorithms that need many draws in one context
/// (shuffles, subset sampling). The engine is itself counter-derived.
inline std::mt19937_64 engine(std::uint64_t seed, std::uint64_t w0,
                              std::uint64_t w1 = 0, std::uint64_t w2 = 0) {
  return std::mt19937_64(hash(seed, w0, w1, w2));
}

}  // namespace nnim::rng
