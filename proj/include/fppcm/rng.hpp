#pragma once

#include <cstdint>
#include <random>

namespace fppcm {

/// Engine used everywhere. State is always caller-owned.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer; the fixed 64-bit hash behind every seed derivation.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent sub-stream seed for a tagged purpose (flags, pairing, weights, ...).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) noexcept {
  return mix64(seed ^ mix64(tag));
}

/// Replication seed: master XOR mix(n, i).
constexpr std::uint64_t replication_seed(std::uint64_t master, std::uint64_t n,
                                         std::uint64_t rep) noexcept {
  return master ^ mix64(mix64(n) ^ rep);
}

/// Uniform on [0,1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0,1].
inline double uniform01_open_closed(Rng& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

/// Uniform integer on [0, bound).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

}  // namespace fppcm
