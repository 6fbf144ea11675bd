// Fixed-mode-count Fourier-Galerkin construction: trigonometric velocity
// basis orthonormal in L² and diagonal in the order-6 Sobolev product, the
// regularized coefficient ODE system, the characteristics formula for the
// density, and the discrete energy balance report.
#pragma once

#include <vector>

#include "ekp/models.hpp"

namespace ekp {

// One real trigonometric vector mode: s(x)·e_axis with s a constant, cosine,
// or sine wave of integer frequency kvec.
struct BasisMode {
  enum class Phase { constant, cosine, sine };
  Phase phase = Phase::constant;
  std::array<int, 2> kvec = {0, 0};
  int axis = 0;
  double weight = 1.0;  // Σ_{j=0..6} |2πk|^{2j}
};

class GalerkinBasis {
 public:
  // modes with |k|² <= k_max² on each retained wave vector, ordered by |k|
  // then axis; include_constant keeps the constant velocity mode.
  GalerkinBasis(const Grid& grid, int k_max, bool include_constant = true);

  const Grid& grid() const { return grid_; }
  int size() const { return int(modes_.size()); }
  const BasisMode& mode(int i) const { return modes_[i]; }
  const VectorField& mode_field(int i) const { return fields_[i]; }
  const VectorField& mode_grad_div(int i) const { return grad_div_fields_[i]; }
  double sobolev_weight(int i) const { return modes_[i].weight; }

  VectorField reconstruct(const std::vector<double>& coeffs) const;
  std::vector<double> project_l2(const VectorField& u) const;

  // point evaluation for characteristics tracing (y ignored in 1D)
  void velocity_at(const std::vector<double>& coeffs, double x, double y, double* u) const;
  double divergence_at(const std::vector<double>& coeffs, double x, double y) const;

 private:
  Grid grid_;
  std::vector<BasisMode> modes_;
  std::vector<VectorField> fields_;
  std::vector<VectorField> grad_div_fields_;
};

double sobolev_inner(const VectorField& u, const VectorField& v);

struct GalerkinState {
  std::vector<double> coeffs;
  ScalarField rho;
  double time = 0.0;
};

// Solves M(ρ)ċ = F for the coefficient derivatives; throws when the mass
// matrix condition number exceeds 1e12 (near-vacuum). The run loop integrates
// the friction term by its exact decay map instead and passes false here.
std::vector<double> galerkin_rhs(const GalerkinBasis& basis, const GalerkinState& state,
                                 const Params& params, double mu, bool include_friction = true);

// Exact solution map of the damped system M(ρ)ċ = -μWc over dt with ρ
// frozen, via the generalized eigenproblem Wv = λMv. The order-6 weights make
// this term far too stiff for explicit stepping at any useful dt.
std::vector<double> apply_sobolev_damping(const GalerkinBasis& basis, const ScalarField& rho,
                                          const std::vector<double>& coeffs, double mu, double dt);

// Velocity coefficients sampled along a run, linearly interpolated in time.
struct CoefficientTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> coeffs;

  std::vector<double> at(double t) const;
};

// Backward-traced characteristics solution of the continuity equation:
//   ρ(t,x) = ρ₀(X(0;t,x)) exp(-(1/ε)∫₀^t div u(τ, X(τ;t,x)) dτ)
ScalarField advect_density_characteristics(const GalerkinBasis& basis, const ScalarField& rho0,
                                           const CoefficientTrajectory& u_history, double t,
                                           const Params& params, int ode_steps = 64);

struct GalerkinSample {
  double time = 0.0;
  GalerkinState state;
  EnergyBreakdown energy;
  double sobolev_uu = 0.0;      // ((u;u))
  double kinetic_rate = 0.0;    // ∫ρ|u|²
  double mu_diss_cum = 0.0;     // μ∫₀^t((u;u)); exact ledger of the damping map
  double fric_diss_cum = 0.0;   // (1/ε²)∫₀^t∫ρ|u|²; per-step trapezoid
};

struct GalerkinRunResult {
  std::vector<GalerkinSample> samples;
  double dt = 0.0;
};

GalerkinRunResult galerkin_run(const GalerkinBasis& basis, const GalerkinState& initial,
                               const Params& params, double mu, double dt, double t_end,
                               int sample_stride = 1);

struct GalerkinEnergyReport {
  double balance_residual = 0.0;  // |E(τ)+μ∫((u;u))+(1/ε²)∫∫ρ|u|² - E(0)|
  double tolerance = 0.0;         // 10·dt²·τ·(|E(0)| + sup dissipation rate)
  bool balanced = false;
  double mu_dissipation = 0.0;    // μ∫₀^τ((u;u))dt
  double sup_rho_inf = 0.0;
  double int_dt_rho_sq = 0.0;     // ∫‖∂_tρ‖²dt (finite differences)
  double sup_u_sobolev = 0.0;     // sup_t ((u;u))^{1/2}
  double sup_grad_phi_l2 = 0.0;
};

GalerkinEnergyReport galerkin_energy_report(const GalerkinRunResult& run, const Params& params, double mu);

}  // namespace ekp
