#pragma once

#include <cstdint>
#include <random>

namespace pchaos {

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of replication `index` under `master`; a pure function of the pair,
// so replications can run in any order on any worker.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master) ^ splitmix64(~index));
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

// Uniform on (0, 1).
inline double uniform_open(Engine& g) {
  return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

inline std::uint64_t poisson_count(Engine& g, double mean) {
  if (!(mean > 0.0)) return 0;
  std::poisson_distribution<std::uint64_t> d(mean);
  return d(g);
}

}  // namespace pchaos
