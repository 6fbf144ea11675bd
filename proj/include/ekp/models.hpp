// Scalar functionals and pointwise closures: γ-law entropy and pressure with
// their Bregman gaps, energy breakdown, relative entropy, corrector velocity,
// the momentum error term of the limit solution, and lower-bound scans.
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ekp/grid.hpp"

namespace ekp {

struct Params {
  double a = 1.0;        // pressure coefficient, > 0
  double b = 0.0;        // potential coupling; b < 0 repulsive
  double c = 0.0;        // Korteweg coefficient, >= 0
  double gamma = 2.0;    // pressure exponent, > 1
  double epsilon = 0.1;  // relaxation scale, > 0
  double friction = 1.0; // k in the unscaled system; fixed to 1 in scaled form

  // throws on a <= 0, c < 0, gamma <= 1, epsilon <= 0, and on b > 0 with
  // gamma <= 2 - 2/d
  void validate(int dim) const;
};

struct EnergyBreakdown {
  double kinetic = 0.0;
  double internal = 0.0;
  double potential = 0.0;  // -(b/2)∫|∇Φ|², sign follows -b
  double korteweg = 0.0;
  double total = 0.0;
};

// Conserved state of the relaxation system: density and momentum m = ρu.
struct State {
  ScalarField rho;
  VectorField momentum;
  double time = 0.0;
};

double entropy_h(double rho, const Params& p);
double h_prime(double rho, const Params& p);
double relative_h(double rho, double r, const Params& p);
double relative_p(double rho, double r, const Params& p);

EnergyBreakdown energy(const State& state, const Params& p);

// U = -ε∇(h'(r) - bΦ_r - cΔr); phi_r must be the zero-mean potential of r.
VectorField limit_velocity_U(const ScalarField& r, const ScalarField& phi_r, const Params& p);

// e = ∂_t(rU) + (1/ε)div(rU⊗U), with a centered O(δt²) time derivative.
// The three snapshots are (r, U) at t-δt, t, t+δt.
VectorField error_term_e(const std::array<ScalarField, 3>& r_snap,
                         const std::array<VectorField, 3>& u_snap,
                         const Params& p, double dt_snap);

double relative_entropy(const State& state, const ScalarField& r, const Params& p);

// ∫|ρ-r|^{min(γ,2)} dx — the Wasserstein-type surrogate of the atomic case
double wasserstein_surrogate(const ScalarField& rho, const ScalarField& r, const Params& p);

struct HBoundsReport {
  double c3 = 0.0;                 // min h(ρ|r)/|ρ-r|² over the scan (γ >= 2)
  bool c3_positive = false;
  std::vector<double> deltas;
  std::vector<double> c_of_delta;  // max (|ρ-r|^γ - δ)₊ / h(ρ|r) per δ
  std::vector<std::pair<double, double>> violations;  // (ρ, r) with nonpositive ratio
};

HBoundsReport verify_h_lower_bounds(const Params& p, int scan_resolution,
                                    double rho_max = 10.0, double r_lo = 0.5, double r_hi = 2.0,
                                    const std::vector<double>& deltas = {0.1, 0.01});

}  // namespace ekp
