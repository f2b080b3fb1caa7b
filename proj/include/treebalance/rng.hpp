#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace treebalance {

// All randomness in the library comes from mt19937_64 streams seeded from a
// single master seed. Streams for independent subtrees are derived by mixing
// the master seed with the subtree root's L/R path, so results do not depend
// on the order (or thread schedule) in which subtrees are probed.
using Rng = std::mt19937_64;

inline constexpr const char* kRngAlgorithm = "mt19937_64";

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::string_view path) {
  std::uint64_t h = mix64(master_seed ^ 0x51cbe4f9a753d9a1ULL);
  for (char c : path) h = mix64(h ^ static_cast<unsigned char>(c));
  return mix64(h ^ static_cast<std::uint64_t>(path.size()));
}

inline Rng make_stream(std::uint64_t master_seed, std::string_view path) {
  return Rng(stream_seed(master_seed, path));
}

// Fair coin; true = right child.
inline bool coin_right(Rng& g) { return (g() >> 63) != 0; }

// Uniform draw in [0, n) via the multiply-shift reduction.
inline std::uint64_t bounded(Rng& g, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(g()) * n) >> 64);
}

}  // namespace treebalance
