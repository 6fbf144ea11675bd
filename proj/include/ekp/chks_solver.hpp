// Limit Cahn-Hilliard-Keller-Segel equation
//   ∂_tρ = div(a∇ρ^γ - bρ∇Φ_ρ - cρ∇Δρ),  -ΔΦ_ρ = ρ - M_ρ
// with a free-energy monitor and the exponential maximum-principle envelopes
// of the chemo-repulsive case.
#pragma once

#include <vector>

#include "ekp/models.hpp"

namespace ekp {

enum class ChksScheme { explicit_rk3, semi_implicit_spectral };

struct ChksConfig {
  Params params;  // epsilon unused
  double dt = 1e-4;
  double t_end = 0.1;
  ChksScheme scheme = ChksScheme::semi_implicit_spectral;
};

struct Envelope {
  bool applicable = false;   // only the c = 0, b = -1, unit-coupling regime
  double rho_star = 0.0;       // min ρ₀
  double rho_upper_star = 0.0; // max ρ₀
  double mean = 0.0;           // M_ρ
  double horizon = 0.0;        // T
  double big_m = 0.0;          // max ρ₀ · exp(M_ρ T)

  double upper(double t) const { return rho_upper_star * std::exp(mean * t); }
  double lower(double t) const { return rho_star * std::exp(-(big_m + mean) * t); }
};

struct ChksSample {
  double time = 0.0;
  ScalarField rho;
  double free_energy = 0.0;  // ∫ h(ρ) - (b/2)|∇Φ_ρ|² + (c/2)|∇ρ|²
  double mass = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
};

struct ChksRunResult {
  std::vector<ChksSample> samples;
  bool free_energy_monotone = true;
  double free_energy_tolerance = 0.0;
  Envelope envelope;
  bool envelope_ok = true;  // vacuously true when inapplicable
  bool aborted = false;
};

ScalarField rhs_chks(const ScalarField& rho, const Params& params);

double chks_free_energy(const ScalarField& rho, const Params& params);

ScalarField chks_step(const ScalarField& rho, const ChksConfig& config);

ChksRunResult chks_run(const ScalarField& initial, const ChksConfig& config, int sample_stride = 10);

Envelope max_principle_envelope(const ScalarField& rho0, const Params& params, double horizon);

}  // namespace ekp
