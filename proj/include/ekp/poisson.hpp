// Zero-mean Poisson solve -ΔΦ = ρ - M_ρ on the torus, plus the empirical
// bracket for the constant relating the potential gap to the entropy gap.
#pragma once

#include <utility>
#include <vector>

#include "ekp/grid.hpp"
#include "ekp/models.hpp"

namespace ekp {

struct PotentialSolve {
  ScalarField phi;        // zero-mean gauge: integrate(phi) == 0
  VectorField grad_phi;   // gradient(phi), same spectral path
  double source_mean = 0.0;  // M_ρ
};

PotentialSolve solve_poisson(const ScalarField& rho);

// Sample-max of ∫|∇Φ_ρ - ∇Φ_r|² / ∫h(ρ|r) over the given pairs; a lower
// bound on the true constant. Pairs with degenerate denominator are skipped;
// throws if every pair degenerates.
double estimate_K(const std::vector<std::pair<ScalarField, ScalarField>>& samples, const Params& params);

}  // namespace ekp
