#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gmv {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the substream addressed by `path` under `master`. Streams with
/// different paths are statistically independent, so Monte Carlo trials can
/// be drawn in any order and still reproduce the same numbers.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(master);
  for (std::uint64_t p : path) s = mix64(s ^ mix64(p + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags.
namespace stream {
inline constexpr std::uint64_t kSignatures = 1;
inline constexpr std::uint64_t kTransform = 2;
inline constexpr std::uint64_t kPartition = 3;
inline constexpr std::uint64_t kPositive = 4;
inline constexpr std::uint64_t kNegative = 5;
inline constexpr std::uint64_t kBloom = 6;
}  // namespace stream

}  // namespace gmv
