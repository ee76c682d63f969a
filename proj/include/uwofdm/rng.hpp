// Seed derivation and complex Gaussian draws shared by the channel model
// and the Monte-Carlo harness.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>

#include "uwofdm/types.hpp"

namespace uwofdm {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Order-sensitive mix of several seed components.
inline uint64_t derive_seed(std::initializer_list<uint64_t> parts) {
  uint64_t h = 0x853c49e6748fea9bull;
  for (uint64_t p : parts) h = splitmix64(h ^ p);
  return h;
}

inline uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

// Distributions are constructed per call: normal_distribution caches a spare
// deviate, and a shared instance would interleave state between generators.

inline double randn(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  return n01(rng);
}

/// Circularly-symmetric complex Gaussian, unit total variance.
inline Complex randn_c(std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double re = n01(rng);
  const double im = n01(rng);
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

}  // namespace uwofdm
