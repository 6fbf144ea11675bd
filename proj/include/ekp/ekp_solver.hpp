// Time integration of the scaled Euler-Korteweg-Poisson system in divergence
// form. Friction is handled by an exact integrating factor inside SSP-RK3, so
// dt is limited by the advective/dispersive CFL only, not by ε².
#pragma once

#include <functional>
#include <vector>

#include "ekp/models.hpp"

namespace ekp {

struct EkpConfig {
  Params params;
  double dt = 1e-3;
  double t_end = 0.1;
  bool imex_friction = true;  // false: friction explicit inside the stage rhs
  double clip_floor = 1e-8;
  double cfl_safety = 0.3;
};

struct DiagnosticsRecord {
  double time = 0.0;
  EnergyBreakdown energy;
  double dissipation = 0.0;  // cumulative (1/ε²)∫₀^t∫ρ|u|²
  double mass = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double res_poisson_stress = 0.0;
  double res_korteweg_stress = 0.0;
};

struct EkpRunResult {
  std::vector<State> samples;
  std::vector<DiagnosticsRecord> records;
  bool energy_inequality_ok = true;
  double energy_margin = 0.0;  // max over samples of E(t)+D(t)-E(0)-tol
  double energy_tolerance = 0.0;
  double max_identity_residual = 0.0;
  double clipped_mass = 0.0;
  bool aborted = false;  // NaN detected; samples end at the last valid state
};

// Full right-hand side of the momentum/continuity system, divergence form,
// friction included. All nonlinear products are dealiased.
std::pair<ScalarField, VectorField> rhs_ekp(const State& state, const Params& params,
                                            bool include_friction = true);

// Max-norm residuals of the two stress-tensor identities
//   (ρ-M)∇Φ = ½∇|∇Φ|² - div(∇Φ⊗∇Φ)
//   ρ∇Δρ    = ∇(½|∇ρ|² + ρΔρ) - div(∇ρ⊗∇ρ)
std::pair<double, double> identity_residuals(const ScalarField& rho, const Params& params);

// Largest stable dt for the given state under the advertised heuristic:
//   dt <= safety · ε · min( Δx/(max|u| + c_s), Δx²/(π²·sqrt(c·ρ_max)) )
// with c_s = sqrt(aγ ρ_max^{γ-1}).
double ekp_cfl_dt(const State& state, const Params& params, double safety = 0.3);

State ekp_step(const State& state, const EkpConfig& config);

EkpRunResult ekp_run(const State& initial, const EkpConfig& config,
                     int sample_stride = 10, int identity_check_stride = 100);

}  // namespace ekp
