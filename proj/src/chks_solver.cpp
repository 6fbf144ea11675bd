#include "ekp/chks_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ekp/poisson.hpp"

namespace ekp {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

// stiff linear symbol about the mean density: aγρ̄^{γ-1}Δ - cρ̄Δ²
double linear_symbol(double k2, double rho_bar, const Params& p) {
  const double diff = p.a * p.gamma * std::pow(rho_bar, p.gamma - 1.0);
  return -(diff * k2 + p.c * rho_bar * k2 * k2);
}
}  // namespace

ScalarField rhs_chks(const ScalarField& rho, const Params& p) {
  if (min_value(rho) <= 0.0) throw std::invalid_argument("rhs_chks: density must be strictly positive");
  const Grid& g = rho.grid;

  // flux = a∇ρ^γ - bρ∇Φ_ρ - cρ∇Δρ; the drift sign is fixed by the Darcy
  // closure of the momentum balance (ρu -> ε(-a∇ρ^γ + bρ∇Φ + cρ∇Δρ))
  ScalarField p_rho(g);
  for (std::size_t i = 0; i < g.size(); ++i) p_rho.values[i] = std::pow(rho.values[i], p.gamma);
  dealias_inplace(p_rho);
  VectorField flux = scale(p.a, gradient(p_rho));

  if (p.b != 0.0) {
    const VectorField gp = solve_poisson(rho).grad_phi;
    for (int a = 0; a < g.dim; ++a) {
      ScalarField entry(g);
      for (std::size_t i = 0; i < g.size(); ++i) entry.values[i] = rho.values[i] * gp.comp[a][i];
      dealias_inplace(entry);
      for (std::size_t i = 0; i < g.size(); ++i) flux.comp[a][i] -= p.b * entry.values[i];
    }
  }
  if (p.c != 0.0) {
    const VectorField glap = gradient(laplacian(rho));
    for (int a = 0; a < g.dim; ++a) {
      ScalarField entry(g);
      for (std::size_t i = 0; i < g.size(); ++i) entry.values[i] = rho.values[i] * glap.comp[a][i];
      dealias_inplace(entry);
      for (std::size_t i = 0; i < g.size(); ++i) flux.comp[a][i] -= p.c * entry.values[i];
    }
  }
  return divergence(flux);
}

double chks_free_energy(const ScalarField& rho, const Params& p) {
  double f = 0.0;
  for (double v : rho.values) f += entropy_h(std::max(v, 0.0), p);
  f /= double(rho.size());
  if (p.b != 0.0) {
    const VectorField gp = solve_poisson(rho).grad_phi;
    double s = 0.0;
    for (int a = 0; a < rho.grid.dim; ++a)
      for (double v : gp.comp[a]) s += v * v;
    f += -0.5 * p.b * s / double(rho.size());
  }
  if (p.c != 0.0) {
    const VectorField gr = gradient(rho);
    double s = 0.0;
    for (int a = 0; a < rho.grid.dim; ++a)
      for (double v : gr.comp[a]) s += v * v;
    f += 0.5 * p.c * s / double(rho.size());
  }
  return f;
}

ScalarField chks_step(const ScalarField& rho, const ChksConfig& cfg) {
  const Params& p = cfg.params;
  const Grid& g = rho.grid;

  if (cfg.scheme == ChksScheme::explicit_rk3) {
    if (p.c > 0.0) throw std::invalid_argument("chks: c > 0 requires the semi-implicit scheme");
    auto stage = [&](const ScalarField& r) {
      ScalarField d = rhs_chks(r, p);
      ScalarField out(r);
      for (std::size_t i = 0; i < r.size(); ++i) out.values[i] += cfg.dt * d.values[i];
      return out;
    };
    ScalarField u1 = stage(rho);
    ScalarField u2 = 0.75 * rho + 0.25 * stage(u1);
    return (1.0 / 3.0) * rho + (2.0 / 3.0) * stage(u2);
  }

  // Lawson (integrating-factor) Euler on the stiff linear part about ρ̄
  const double rho_bar = integrate(rho);
  ScalarField full = rhs_chks(rho, p);

  Spectrum s_rho = to_spectrum(rho);
  Spectrum s_rhs = to_spectrum(full);
  const int nh = g.n / 2 + 1;
  auto at = [&](Spectrum& s, int i, int j) -> std::complex<double>& {
    return g.dim == 1 ? s[j] : s[std::size_t(i) * nh + j];
  };
  const int rows = g.dim == 1 ? 1 : g.n;
  Spectrum out(s_rho.size());
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < nh; ++j) {
      const int kx = g.dim == 1 ? j : g.freq(i);
      const int ky = g.dim == 1 ? 0 : j;
      const double k2 = (two_pi * two_pi) * (double(kx) * kx + double(ky) * ky);
      const double L = linear_symbol(k2, rho_bar, p);
      const std::complex<double> nonlinear = at(s_rhs, i, j) - L * at(s_rho, i, j);
      at(out, i, j) = std::exp(L * cfg.dt) * (at(s_rho, i, j) + cfg.dt * nonlinear);
    }
  }
  return from_spectrum(g, out);
}

Envelope max_principle_envelope(const ScalarField& rho0, const Params& p, double horizon) {
  Envelope env;
  env.rho_star = min_value(rho0);
  env.rho_upper_star = max_value(rho0);
  env.mean = integrate(rho0);
  env.horizon = horizon;
  env.big_m = env.rho_upper_star * std::exp(env.mean * horizon);
  // bounds are derived for the unit-coupling repulsive system only
  env.applicable = (p.c == 0.0 && p.b == -1.0);
  return env;
}

ChksRunResult chks_run(const ScalarField& initial, const ChksConfig& cfg, int sample_stride) {
  if (cfg.dt <= 0.0) throw std::invalid_argument("chks_run: dt must be > 0");
  if (min_value(initial) <= 0.0) throw std::invalid_argument("chks_run: initial density must be > 0");
  if (cfg.params.c > 0.0 && cfg.scheme != ChksScheme::semi_implicit_spectral)
    throw std::invalid_argument("chks_run: c > 0 requires the semi-implicit scheme");

  ChksRunResult res;
  res.envelope = max_principle_envelope(initial, cfg.params, cfg.t_end);

  ScalarField rho = initial;
  double t = 0.0;
  const double f0 = chks_free_energy(rho, cfg.params);
  res.free_energy_tolerance = 10.0 * cfg.dt * cfg.t_end * std::abs(f0);

  auto record = [&](const ScalarField& r, double time) {
    ChksSample smp;
    smp.time = time;
    smp.rho = r;
    smp.free_energy = chks_free_energy(r, cfg.params);
    smp.mass = integrate(r);
    smp.min_rho = min_value(r);
    smp.max_rho = max_value(r);
    res.samples.push_back(std::move(smp));
    if (res.envelope.applicable) {
      const double lo = res.envelope.lower(time) * (1.0 - 1e-6);
      const double hi = res.envelope.upper(time) * (1.0 + 1e-6);
      if (res.samples.back().min_rho < lo || res.samples.back().max_rho > hi) res.envelope_ok = false;
    }
  };
  record(rho, 0.0);

  const long nsteps = std::lround(cfg.t_end / cfg.dt);
  double f_prev = f0;
  for (long step = 1; step <= nsteps; ++step) {
    rho = chks_step(rho, cfg);
    t = step * cfg.dt;
    if (!all_finite(rho)) {
      res.aborted = true;
      break;
    }
    if (step % sample_stride == 0 || step == nsteps) {
      record(rho, t);
      const double f = res.samples.back().free_energy;
      if (f > f_prev + res.free_energy_tolerance) res.free_energy_monotone = false;
      f_prev = std::min(f_prev, f);
    }
  }
  return res;
}

}  // namespace ekp
