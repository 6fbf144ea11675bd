#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "ekp/grid.hpp"

namespace ekp::test {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// f = mean + Σ amp_k cos(2πkx) + bmp_k sin(2πkx) on the x axis
inline ScalarField cosine_field(const Grid& g, double mean, double amp, int k = 1) {
  const ScalarField x = coordinate(g, 0);
  ScalarField f(g, mean);
  for (std::size_t i = 0; i < g.size(); ++i) f.values[i] += amp * std::cos(kTwoPi * k * x.values[i]);
  return f;
}

inline ScalarField sine_field(const Grid& g, double mean, double amp, int k = 1) {
  const ScalarField x = coordinate(g, 0);
  ScalarField f(g, mean);
  for (std::size_t i = 0; i < g.size(); ++i) f.values[i] += amp * std::sin(kTwoPi * k * x.values[i]);
  return f;
}

// random real field band-limited to |k| <= k_max on each axis
inline ScalarField random_band_limited(const Grid& g, int k_max, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const ScalarField x = coordinate(g, 0);
  const ScalarField y = g.dim == 2 ? coordinate(g, 1) : ScalarField(g);
  ScalarField f(g);
  for (int kx = 0; kx <= k_max; ++kx) {
    for (int ky = (g.dim == 2 ? -k_max : 0); ky <= (g.dim == 2 ? k_max : 0); ++ky) {
      if (kx == 0 && ky < 0) continue;
      if (kx == 0 && ky == 0) continue;
      const double ac = scale * unit(rng), as = scale * unit(rng);
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double theta = kTwoPi * (kx * x.values[i] + ky * y.values[i]);
        f.values[i] += ac * std::cos(theta) + as * std::sin(theta);
      }
    }
  }
  return f;
}

inline double max_err(const ScalarField& a, const ScalarField& b) { return max_abs(a - b); }

}  // namespace ekp::test
