#include "ekp/poisson.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ekp {

PotentialSolve solve_poisson(const ScalarField& rho) {
  if (!all_finite(rho)) throw std::invalid_argument("solve_poisson: source is not finite");
  const Grid& g = rho.grid;
  constexpr double two_pi = 2.0 * std::numbers::pi;

  Spectrum s = to_spectrum(rho);
  for_each_mode(g, s, [&](std::complex<double>& c, int kx, int ky) {
    const double k2 = (two_pi * two_pi) * (double(kx) * kx + double(ky) * ky);
    if (k2 == 0.0) {
      c = 0.0;  // zero-mean gauge, mean of the source subtracted implicitly
    } else {
      c /= k2;
    }
  });

  PotentialSolve out;
  out.source_mean = integrate(rho);
  out.phi = from_spectrum(g, s);
  out.grad_phi = gradient(out.phi);
  return out;
}

double estimate_K(const std::vector<std::pair<ScalarField, ScalarField>>& samples, const Params& params) {
  double best = -1.0;
  for (const auto& [rho, r] : samples) {
    require_same_grid(rho.grid, r.grid);
    double denom = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i)
      denom += relative_h(rho.values[i], r.values[i], params);
    denom /= double(rho.size());
    if (denom < 1e-14) continue;

    const VectorField dphi = solve_poisson(rho).grad_phi - solve_poisson(r).grad_phi;
    double numer = 0.0;
    for (int a = 0; a < rho.grid.dim; ++a)
      for (double v : dphi.comp[a]) numer += v * v;
    numer /= double(rho.size());
    best = std::max(best, numer / denom);
  }
  if (best < 0.0) throw std::runtime_error("estimate_K: all sample pairs are degenerate (rho == r)");
  return best;
}

}  // namespace ekp
