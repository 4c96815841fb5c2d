#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace predprey {

/// Random stream used everywhere. Only the raw 64-bit engine output is
/// consumed so that draws are bit-reproducible across standard libraries.
using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1].
inline double uniform_open0(Rng& rng) { return 1.0 - uniform01(rng); }

/// Exp(1) draw.
inline double standard_exponential(Rng& rng) {
  return -std::log(uniform_open0(rng));
}

/// SplitMix64 finalizer; used to derive independent per-replica seeds.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return splitmix64(splitmix64(root) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

}  // namespace predprey
