// Uniform periodic grids on the unit torus T^d (d = 1, 2) with spectrally
// exact differential operators. All transforms go through FFTW; plans are
// cached per (dim, n) and execution is thread-safe on distinct buffers.
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ekp {

struct Grid {
  int dim = 1;              // 1 or 2
  int n = 0;                // points per axis, power of two, >= 8
  double spacing = 0.0;     // 1/n, torus normalized to unit period

  static Grid make(int dim, int points_per_axis);

  std::size_t size() const { return dim == 1 ? std::size_t(n) : std::size_t(n) * n; }
  bool operator==(const Grid& o) const { return dim == o.dim && n == o.n; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

  // integer frequency of axis index i, in [-n/2, n/2]
  int freq(int i) const { return i <= n / 2 ? i : i - n; }
};

struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }
};

struct VectorField {
  Grid grid;
  std::array<std::vector<double>, 2> comp;  // comp[a] for axis a < grid.dim

  VectorField() = default;
  explicit VectorField(const Grid& g) : grid(g) {
    for (int a = 0; a < g.dim; ++a) comp[a].assign(g.size(), 0.0);
  }

  std::vector<double>& operator[](int a) { return comp[a]; }
  const std::vector<double>& operator[](int a) const { return comp[a]; }
};

// Spectral coefficients in FFTW r2c layout: 1D size n/2+1, 2D size n*(n/2+1).
using Spectrum = std::vector<std::complex<double>>;

Spectrum to_spectrum(const ScalarField& f);
ScalarField from_spectrum(const Grid& g, const Spectrum& s);

// Visit every retained mode. In the r2c layout the first axis carries full
// frequencies and the last axis only 0..n/2; ky = 0 in 1D.
template <class F>
void for_each_mode(const Grid& g, Spectrum& s, F&& fn) {
  const int nh = g.n / 2 + 1;
  if (g.dim == 1) {
    for (int j = 0; j < nh; ++j) fn(s[j], j, 0);
  } else {
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < nh; ++j) fn(s[std::size_t(i) * nh + j], g.freq(i), j);
  }
}

// Point samples of one axis coordinate, row-major (x fastest in 1D; in 2D the
// layout is x-major rows, index = ix*n + iy with coordinates (ix*h, iy*h)).
ScalarField coordinate(const Grid& g, int axis);

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
ScalarField laplacian(const ScalarField& f);
double integrate(const ScalarField& f);
ScalarField dealias(const ScalarField& f);
void dealias_inplace(ScalarField& f);

double max_abs(const ScalarField& f);
double l2_norm(const ScalarField& f);
double l2_norm(const VectorField& v);
double min_value(const ScalarField& f);
double max_value(const ScalarField& f);
bool all_finite(const ScalarField& f);

// pointwise helpers
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& a);
ScalarField pointwise_mul(const ScalarField& a, const ScalarField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField scale(double c, const VectorField& a);
VectorField pointwise_mul(const ScalarField& a, const VectorField& v);
ScalarField dot(const VectorField& a, const VectorField& b);

// Spectral restriction of a field to a coarser grid with the same dim.
ScalarField restrict_to(const ScalarField& f, const Grid& coarse);

void require_same_grid(const Grid& a, const Grid& b);

}  // namespace ekp
