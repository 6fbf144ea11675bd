#include <cmath>

#include "doctest.h"
#include "ekp/poisson.hpp"
#include "test_util.hpp"

using namespace ekp;
using namespace ekp::test;

TEST_CASE("constant source yields zero potential") {
  const Grid g = Grid::make(1, 64);
  const PotentialSolve sol = solve_poisson(ScalarField(g, 2.5));
  CHECK(max_abs(sol.phi) < 1e-13);
  CHECK(sol.source_mean == doctest::Approx(2.5));
}

TEST_CASE("single-mode sources invert the Laplace symbol exactly") {
  const Grid g = Grid::make(1, 64);
  {
    const PotentialSolve sol = solve_poisson(cosine_field(g, 1.5, 1.0));
    const ScalarField expected = cosine_field(g, 0.0, 1.0 / (4.0 * std::numbers::pi * std::numbers::pi));
    CHECK(max_err(sol.phi, expected) < 1e-12);
  }
  {
    const PotentialSolve sol = solve_poisson(sine_field(g, 1.0, 1.0, 2));
    const ScalarField expected = sine_field(g, 0.0, 1.0 / (16.0 * std::numbers::pi * std::numbers::pi), 2);
    CHECK(max_err(sol.phi, expected) < 1e-12);
  }
}

TEST_CASE("potential solve invariants hold for band-limited sources") {
  const Grid g = Grid::make(2, 32);
  const ScalarField rho = random_band_limited(g, 5, 13, 0.2) + ScalarField(g, 1.0);
  const PotentialSolve sol = solve_poisson(rho);

  CHECK(std::abs(integrate(sol.phi)) < 1e-12);
  // -ΔΦ = ρ - M
  const ScalarField residual = laplacian(sol.phi) + rho - ScalarField(g, sol.source_mean);
  CHECK(max_abs(residual) < 1e-10);
  // grad_phi comes from the same spectral path as gradient(phi)
  const VectorField grad = gradient(sol.phi);
  for (int a = 0; a < g.dim; ++a)
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(sol.grad_phi.comp[a][i] == grad.comp[a][i]);
}

TEST_CASE("potential solve is affine-equivariant in the source") {
  const Grid g = Grid::make(1, 64);
  const ScalarField rho = random_band_limited(g, 8, 7, 0.3) + ScalarField(g, 1.0);
  const double alpha = 2.25, beta = 0.4;
  const ScalarField scaled = alpha * rho + ScalarField(g, beta);
  CHECK(max_err(solve_poisson(scaled).phi, alpha * solve_poisson(rho).phi) < 1e-12);
}

TEST_CASE("degenerate sample set is rejected") {
  const Grid g = Grid::make(1, 64);
  const ScalarField r(g, 1.0);
  Params p;
  CHECK_THROWS(estimate_K({{r, r}}, p));
}

TEST_CASE("single-mode perturbations reproduce the closed-form ratio") {
  // ρ = r + δcos(2πx), r ≡ 1, γ = 2, a = 1:
  //   ∫|∇Φ_ρ - ∇Φ_r|² = δ²/(8π²),  ∫h(ρ|r) = δ²/2,  ratio = 1/(4π²)
  const Grid g = Grid::make(1, 64);
  const ScalarField r(g, 1.0);
  Params p;
  std::vector<std::pair<ScalarField, ScalarField>> samples;
  for (double delta : {0.1, 0.01}) samples.push_back({cosine_field(g, 1.0, delta), r});
  const double ratio = estimate_K(samples, p);
  CHECK(ratio == doctest::Approx(1.0 / (4.0 * std::numbers::pi * std::numbers::pi)).epsilon(1e-10));
}

TEST_CASE("random perturbation pairs give a refinement-stable bound") {
  Params p;
  auto bound_at = [&](int n) {
    const Grid g = Grid::make(1, n);
    std::vector<std::pair<ScalarField, ScalarField>> samples;
    for (unsigned seed = 0; seed < 50; ++seed) {
      const ScalarField r = random_band_limited(g, 4, 1000 + seed, 0.05) + ScalarField(g, 1.0);
      const ScalarField rho = r + random_band_limited(g, 4, 2000 + seed, 0.05);
      samples.push_back({rho, r});
    }
    return estimate_K(samples, p);
  };
  const double coarse = bound_at(64);
  const double fine = bound_at(128);
  CHECK(coarse > 0.0);
  CHECK(fine == doctest::Approx(coarse).epsilon(0.2));
}
