#include "ekp/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace ekp {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

// Plans are created once per (dim, n) with FFTW_UNALIGNED so that they can be
// executed on arbitrary caller buffers via the new-array interface.
PlanPair& plans_for(const Grid& g) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(g.dim, g.n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const std::size_t nreal = g.size();
  const std::size_t ncplx = g.dim == 1 ? std::size_t(g.n / 2 + 1) : std::size_t(g.n) * (g.n / 2 + 1);
  std::vector<double> rbuf(nreal);
  std::vector<std::complex<double>> cbuf(ncplx);
  auto* cptr = reinterpret_cast<fftw_complex*>(cbuf.data());

  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (g.dim == 1) {
    p.fwd = fftw_plan_dft_r2c_1d(g.n, rbuf.data(), cptr, flags);
    p.bwd = fftw_plan_dft_c2r_1d(g.n, cptr, rbuf.data(), flags);
  } else {
    p.fwd = fftw_plan_dft_r2c_2d(g.n, g.n, rbuf.data(), cptr, flags);
    p.bwd = fftw_plan_dft_c2r_2d(g.n, g.n, cptr, rbuf.data(), flags);
  }
  return cache.emplace(key, p).first->second;
}

}  // namespace

Grid Grid::make(int dim, int points_per_axis) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("Grid: dim must be 1 or 2");
  if (points_per_axis < 8 || !is_pow2(points_per_axis))
    throw std::invalid_argument("Grid: points_per_axis must be a power of two >= 8");
  Grid g;
  g.dim = dim;
  g.n = points_per_axis;
  g.spacing = 1.0 / points_per_axis;
  return g;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (a != b) throw std::invalid_argument("field does not match the expected grid");
}

Spectrum to_spectrum(const ScalarField& f) {
  const Grid& g = f.grid;
  const std::size_t ncplx = g.dim == 1 ? std::size_t(g.n / 2 + 1) : std::size_t(g.n) * (g.n / 2 + 1);
  Spectrum s(ncplx);
  std::vector<double> in(f.values);  // r2c destroys input
  fftw_execute_dft_r2c(plans_for(g).fwd, in.data(), reinterpret_cast<fftw_complex*>(s.data()));
  const double inv = 1.0 / double(g.size());
  for (auto& c : s) c *= inv;
  return s;
}

ScalarField from_spectrum(const Grid& g, const Spectrum& s) {
  Spectrum tmp(s);  // c2r destroys input
  ScalarField out(g);
  fftw_execute_dft_c2r(plans_for(g).bwd, reinterpret_cast<fftw_complex*>(tmp.data()), out.values.data());
  return out;
}

ScalarField coordinate(const Grid& g, int axis) {
  ScalarField out(g);
  const double h = g.spacing;
  if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) out.values[i] = i * h;
  } else {
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j) out.values[std::size_t(i) * g.n + j] = (axis == 0 ? i : j) * h;
  }
  return out;
}

VectorField gradient(const ScalarField& f) {
  if (!all_finite(f)) throw std::invalid_argument("gradient: field is not finite");
  const Grid& g = f.grid;
  Spectrum base = to_spectrum(f);
  VectorField out(g);
  for (int a = 0; a < g.dim; ++a) {
    Spectrum s(base);
    for_each_mode(g, s, [&](std::complex<double>& c, int kx, int ky) {
      const int k = a == 0 ? kx : ky;
      // Nyquist derivative has no well-defined sign on the real grid
      if (std::abs(k) == g.n / 2) {
        c = 0.0;
      } else {
        c *= std::complex<double>(0.0, two_pi * k);
      }
    });
    out.comp[a] = from_spectrum(g, s).values;
  }
  return out;
}

ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid;
  Spectrum acc(g.dim == 1 ? std::size_t(g.n / 2 + 1) : std::size_t(g.n) * (g.n / 2 + 1), 0.0);
  for (int a = 0; a < g.dim; ++a) {
    ScalarField cf;
    cf.grid = g;
    cf.values = v.comp[a];
    if (!all_finite(cf)) throw std::invalid_argument("divergence: field is not finite");
    Spectrum s = to_spectrum(cf);
    for_each_mode(g, s, [&](std::complex<double>& c, int kx, int ky) {
      const int k = a == 0 ? kx : ky;
      if (std::abs(k) == g.n / 2) {
        c = 0.0;
      } else {
        c *= std::complex<double>(0.0, two_pi * k);
      }
    });
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += s[i];
  }
  return from_spectrum(g, acc);
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  Spectrum s = to_spectrum(f);
  for_each_mode(g, s, [&](std::complex<double>& c, int kx, int ky) {
    c *= -(two_pi * two_pi) * (double(kx) * kx + double(ky) * ky);
  });
  return from_spectrum(g, s);
}

double integrate(const ScalarField& f) {
  // uniform periodic trapezoid = mean; |T^d| = 1
  double sum = 0.0;
  for (double v : f.values) sum += v;
  return sum / double(f.size());
}

void dealias_inplace(ScalarField& f) {
  const Grid& g = f.grid;
  const int cut = g.n / 3;
  Spectrum s = to_spectrum(f);
  for_each_mode(g, s, [&](std::complex<double>& c, int kx, int ky) {
    if (std::abs(kx) > cut || std::abs(ky) > cut) c = 0.0;
  });
  f = from_spectrum(g, s);
}

ScalarField dealias(const ScalarField& f) {
  ScalarField out(f);
  dealias_inplace(out);
  return out;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double l2_norm(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values) s += v * v;
  return std::sqrt(s / double(f.size()));
}

double l2_norm(const VectorField& v) {
  double s = 0.0;
  for (int a = 0; a < v.grid.dim; ++a)
    for (double x : v.comp[a]) s += x * x;
  return std::sqrt(s / double(v.grid.size()));
}

double min_value(const ScalarField& f) { return *std::min_element(f.values.begin(), f.values.end()); }
double max_value(const ScalarField& f) { return *std::max_element(f.values.begin(), f.values.end()); }

bool all_finite(const ScalarField& f) {
  for (double v : f.values)
    if (!std::isfinite(v)) return false;
  return true;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  ScalarField out(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += b.values[i];
  return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  ScalarField out(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] -= b.values[i];
  return out;
}

ScalarField operator*(double c, const ScalarField& a) {
  ScalarField out(a);
  for (auto& v : out.values) v *= c;
  return out;
}

ScalarField pointwise_mul(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid, b.grid);
  ScalarField out(a);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] *= b.values[i];
  return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid);
  VectorField out(a);
  for (int c = 0; c < a.grid.dim; ++c)
    for (std::size_t i = 0; i < out.comp[c].size(); ++i) out.comp[c][i] -= b.comp[c][i];
  return out;
}

VectorField scale(double c, const VectorField& a) {
  VectorField out(a);
  for (int ax = 0; ax < a.grid.dim; ++ax)
    for (auto& v : out.comp[ax]) v *= c;
  return out;
}

VectorField pointwise_mul(const ScalarField& a, const VectorField& v) {
  require_same_grid(a.grid, v.grid);
  VectorField out(v);
  for (int ax = 0; ax < v.grid.dim; ++ax)
    for (std::size_t i = 0; i < out.comp[ax].size(); ++i) out.comp[ax][i] *= a.values[i];
  return out;
}

ScalarField dot(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid, b.grid);
  ScalarField out(a.grid);
  for (int ax = 0; ax < a.grid.dim; ++ax)
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += a.comp[ax][i] * b.comp[ax][i];
  return out;
}

ScalarField restrict_to(const ScalarField& f, const Grid& coarse) {
  if (f.grid.dim != coarse.dim) throw std::invalid_argument("restrict_to: dimension mismatch");
  if (f.grid.n == coarse.n) return f;
  if (f.grid.n < coarse.n) throw std::invalid_argument("restrict_to: target grid is finer");
  Spectrum fine = to_spectrum(f);
  const Grid& gf = f.grid;
  const int nhc = coarse.n / 2 + 1;
  Spectrum out(coarse.dim == 1 ? std::size_t(nhc) : std::size_t(coarse.n) * nhc, 0.0);
  const int nhf = gf.n / 2 + 1;
  if (coarse.dim == 1) {
    for (int j = 0; j < nhc; ++j) out[j] = fine[j];
    out[coarse.n / 2] = 0.0;  // drop the coarse Nyquist rather than fold it
  } else {
    for (int i = 0; i < coarse.n; ++i) {
      const int kf = coarse.freq(i);
      if (std::abs(kf) == coarse.n / 2) continue;
      const int src_i = kf >= 0 ? kf : kf + gf.n;
      for (int j = 0; j < nhc; ++j) {
        if (j == coarse.n / 2) continue;
        out[std::size_t(i) * nhc + j] = fine[std::size_t(src_i) * nhf + j];
      }
    }
  }
  return from_spectrum(coarse, out);
}

}  // namespace ekp
