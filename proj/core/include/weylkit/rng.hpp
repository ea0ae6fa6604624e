#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace weylkit::rng {

// mt19937_64-based helpers with an explicit bits-to-double mapping. The
// standard distribution classes are implementation-defined; these are not,
// so a seed pins the exact sample sequence.

inline double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1p-53;
}

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return lo + (hi - lo) * uniform01(gen);
}

// Box-Muller from two fresh uniforms per call.
inline double gaussian(std::mt19937_64& gen) {
  const double u1 = (static_cast<double>(gen() >> 11) + 1.0) * 0x1p-53;  // (0,1]
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

// Uniform direction on the unit sphere in R^k.
inline std::vector<double> unit_vector(std::mt19937_64& gen, int k) {
  for (;;) {
    std::vector<double> v(static_cast<std::size_t>(k));
    double norm2 = 0.0;
    for (auto& c : v) {
      c = gaussian(gen);
      norm2 += c * c;
    }
    if (norm2 < 1e-12) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : v) c *= inv;
    return v;
  }
}

}  // namespace weylkit::rng
