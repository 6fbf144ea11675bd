#include "ekp/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ekp/poisson.hpp"

namespace ekp {

namespace {
// |m|²/ρ with the vacuum convention: zero at clipped densities, error if
// momentum survives where the density vanished.
double kinetic_density(double rho, double m2) {
  if (rho <= 1e-12) {
    if (m2 > 1e-16) throw std::runtime_error("kinetic: nonzero momentum at vacuum density");
    return 0.0;
  }
  return m2 / rho;
}
}  // namespace

void Params::validate(int dim) const {
  if (a <= 0.0) throw std::invalid_argument("Params: a must be > 0");
  if (c < 0.0) throw std::invalid_argument("Params: c must be >= 0");
  if (gamma <= 1.0) throw std::invalid_argument("Params: gamma must be > 1");
  if (epsilon <= 0.0) throw std::invalid_argument("Params: epsilon must be > 0");
  if (b > 0.0 && gamma <= 2.0 - 2.0 / double(dim))
    throw std::invalid_argument("Params: attractive coupling requires gamma > 2 - 2/d");
}

double entropy_h(double rho, const Params& p) {
  if (rho < 0.0) throw std::invalid_argument("entropy_h: negative density");
  return p.a / (p.gamma - 1.0) * std::pow(rho, p.gamma);
}

double h_prime(double rho, const Params& p) {
  if (rho < 0.0) throw std::invalid_argument("h_prime: negative density");
  return p.a * p.gamma / (p.gamma - 1.0) * std::pow(rho, p.gamma - 1.0);
}

double relative_h(double rho, double r, const Params& p) {
  if (r <= 0.0) throw std::invalid_argument("relative_h: reference density must be > 0");
  return entropy_h(rho, p) - entropy_h(r, p) - h_prime(r, p) * (rho - r);
}

double relative_p(double rho, double r, const Params& p) {
  if (r <= 0.0) throw std::invalid_argument("relative_p: reference density must be > 0");
  auto pr = [&](double x) { return p.a * std::pow(x, p.gamma); };
  const double dp = p.a * p.gamma * std::pow(r, p.gamma - 1.0);
  return pr(rho) - pr(r) - dp * (rho - r);
}

EnergyBreakdown energy(const State& state, const Params& p) {
  const Grid& g = state.rho.grid;
  require_same_grid(g, state.momentum.grid);
  const std::size_t sz = g.size();

  EnergyBreakdown e;
  for (std::size_t i = 0; i < sz; ++i) {
    const double rho = state.rho.values[i];
    if (rho < -1e-10) throw std::runtime_error("energy: density below clipping tolerance");
    double m2 = 0.0;
    for (int a = 0; a < g.dim; ++a) m2 += state.momentum.comp[a][i] * state.momentum.comp[a][i];
    e.kinetic += 0.5 * kinetic_density(std::max(rho, 0.0), m2);
    e.internal += entropy_h(std::max(rho, 0.0), p);
  }
  e.kinetic /= double(sz);
  e.internal /= double(sz);

  if (p.b != 0.0) {
    const VectorField gp = solve_poisson(state.rho).grad_phi;
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a)
      for (double v : gp.comp[a]) s += v * v;
    e.potential = -0.5 * p.b * s / double(sz);
  }
  if (p.c != 0.0) {
    const VectorField gr = gradient(state.rho);
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a)
      for (double v : gr.comp[a]) s += v * v;
    e.korteweg = 0.5 * p.c * s / double(sz);
  }
  e.total = e.kinetic + e.internal + e.potential + e.korteweg;
  return e;
}

VectorField limit_velocity_U(const ScalarField& r, const ScalarField& phi_r, const Params& p) {
  require_same_grid(r.grid, phi_r.grid);
  if (min_value(r) <= 0.0) throw std::invalid_argument("limit_velocity_U: r must be strictly positive");

  ScalarField chem(r.grid);
  for (std::size_t i = 0; i < r.size(); ++i) chem.values[i] = h_prime(r.values[i], p);
  if (p.b != 0.0) chem = chem - p.b * phi_r;
  if (p.c != 0.0) chem = chem - p.c * laplacian(r);
  return scale(-p.epsilon, gradient(chem));
}

VectorField error_term_e(const std::array<ScalarField, 3>& r_snap,
                         const std::array<VectorField, 3>& u_snap,
                         const Params& p, double dt_snap) {
  if (dt_snap <= 0.0) throw std::invalid_argument("error_term_e: need dt_snap > 0");
  const Grid& g = r_snap[1].grid;

  // ∂_t(rU), centered
  VectorField dtrU(g);
  for (int a = 0; a < g.dim; ++a)
    for (std::size_t i = 0; i < g.size(); ++i)
      dtrU.comp[a][i] = (r_snap[2].values[i] * u_snap[2].comp[a][i] -
                         r_snap[0].values[i] * u_snap[0].comp[a][i]) / (2.0 * dt_snap);

  // (1/ε) div(rU⊗U): row a is div over axis b of r U_a U_b
  const ScalarField& r = r_snap[1];
  const VectorField& U = u_snap[1];
  VectorField out(g);
  for (int a = 0; a < g.dim; ++a) {
    VectorField row(g);
    for (int b = 0; b < g.dim; ++b)
      for (std::size_t i = 0; i < g.size(); ++i)
        row.comp[b][i] = r.values[i] * U.comp[a][i] * U.comp[b][i];
    const ScalarField diva = divergence(row);
    for (std::size_t i = 0; i < g.size(); ++i)
      out.comp[a][i] = dtrU.comp[a][i] + diva.values[i] / p.epsilon;
  }
  return out;
}

double relative_entropy(const State& state, const ScalarField& r, const Params& p) {
  const Grid& g = state.rho.grid;
  require_same_grid(g, r.grid);
  const std::size_t sz = g.size();

  const PotentialSolve pr = solve_poisson(r);
  const VectorField U = limit_velocity_U(r, pr.phi, p);

  double acc = 0.0;
  for (std::size_t i = 0; i < sz; ++i) {
    const double rho = std::max(state.rho.values[i], 0.0);
    double du2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double m = state.momentum.comp[a][i];
      const double u = rho > 1e-12 ? m / rho : 0.0;
      if (rho <= 1e-12 && std::abs(m) > 1e-8)
        throw std::runtime_error("relative_entropy: nonzero momentum at vacuum density");
      const double d = u - U.comp[a][i];
      du2 += d * d;
    }
    acc += 0.5 * rho * du2 + relative_h(rho, r.values[i], p);
  }
  acc /= double(sz);

  if (p.b != 0.0) {
    const VectorField dphi = solve_poisson(state.rho).grad_phi - pr.grad_phi;
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a)
      for (double v : dphi.comp[a]) s += v * v;
    acc += -0.5 * p.b * s / double(sz);
  }
  if (p.c != 0.0) {
    const VectorField dgr = gradient(state.rho) - gradient(r);
    double s = 0.0;
    for (int a = 0; a < g.dim; ++a)
      for (double v : dgr.comp[a]) s += v * v;
    acc += 0.5 * p.c * s / double(sz);
  }
  return acc;
}

double wasserstein_surrogate(const ScalarField& rho, const ScalarField& r, const Params& p) {
  require_same_grid(rho.grid, r.grid);
  const double q = std::min(p.gamma, 2.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    acc += std::pow(std::abs(rho.values[i] - r.values[i]), q);
  return acc / double(rho.size());
}

HBoundsReport verify_h_lower_bounds(const Params& p, int scan_resolution,
                                    double rho_max, double r_lo, double r_hi,
                                    const std::vector<double>& deltas) {
  if (scan_resolution < 2) throw std::invalid_argument("verify_h_lower_bounds: scan too coarse");
  HBoundsReport rep;
  rep.deltas = deltas;
  rep.c_of_delta.assign(deltas.size(), 0.0);
  rep.c3 = std::numeric_limits<double>::infinity();

  for (int i = 0; i < scan_resolution; ++i) {
    // open at 0: start the density scan strictly inside
    const double rho = rho_max * (i + 1) / double(scan_resolution);
    for (int j = 0; j < scan_resolution; ++j) {
      const double r = r_lo + (r_hi - r_lo) * j / double(scan_resolution - 1);
      if (std::abs(rho - r) < 1e-9) continue;
      const double h = relative_h(rho, r, p);
      if (h <= 0.0) {
        rep.violations.emplace_back(rho, r);
        continue;
      }
      const double gap2 = (rho - r) * (rho - r);
      rep.c3 = std::min(rep.c3, h / gap2);
      for (std::size_t d = 0; d < deltas.size(); ++d) {
        const double num = std::pow(std::abs(rho - r), p.gamma) - deltas[d];
        if (num > 0.0) rep.c_of_delta[d] = std::max(rep.c_of_delta[d], num / h);
      }
    }
  }
  rep.c3_positive = rep.violations.empty() && rep.c3 > 0.0;
  return rep;
}

}  // namespace ekp
