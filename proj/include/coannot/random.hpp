#pragma once

// Portable sampling helpers on top of std::mt19937_64. The engine itself is
// fully specified by the standard, but std::*_distribution and std::shuffle are
// not, so pinned regression values would drift between standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace coannot::rng {

using Engine = std::mt19937_64;

// splitmix64 finalizer; derives independent sub-seeds from one user seed.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
  return mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL));
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, n), rejection sampling. n must be > 0.
inline std::uint64_t below(Engine& eng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = eng();
  } while (x >= limit);
  return x % n;
}

inline bool bernoulli(Engine& eng, double p) { return uniform(eng) < p; }

// Standard normal via Box-Muller (one value per call).
inline double normal(Engine& eng) {
  double u1 = uniform(eng);
  while (u1 <= 0.0) u1 = uniform(eng);
  const double u2 = uniform(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename T>
void shuffle(std::vector<T>& v, Engine& eng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(below(eng, i));
    using std::swap;
    swap(v[i - 1], v[j]);
  }
}

}  // namespace coannot::rng
