#include <cmath>

#include "doctest.h"
#include "ekp/models.hpp"
#include "ekp/poisson.hpp"
#include "test_util.hpp"

using namespace ekp;
using namespace ekp::test;

TEST_CASE("parameter validation") {
  Params p;
  CHECK_NOTHROW(p.validate(1));
  p.a = 0.0;
  CHECK_THROWS(p.validate(1));
  p = Params{};
  p.c = -0.1;
  CHECK_THROWS(p.validate(1));
  p = Params{};
  p.gamma = 1.0;
  CHECK_THROWS(p.validate(1));
  p = Params{};
  p.epsilon = 0.0;
  CHECK_THROWS(p.validate(1));
  // attractive coupling requires gamma > 2 - 2/d; with gamma > 1 already
  // enforced, the gate is vacuous for d <= 2 but must still accept b > 0
  p = Params{};
  p.b = 1.0;
  p.gamma = 1.05;
  CHECK_NOTHROW(p.validate(1));
  CHECK_NOTHROW(p.validate(2));
}

TEST_CASE("entropy and its derivative") {
  Params p;  // a = 1, gamma = 2
  CHECK(entropy_h(0.0, p) == doctest::Approx(0.0));
  CHECK(entropy_h(3.0, p) == doctest::Approx(9.0));
  CHECK_THROWS(entropy_h(-0.5, p));

  p.gamma = 1.7;
  p.a = 0.8;
  for (double rho : {0.5, 1.0, 2.5}) {
    const double delta = 1e-5;
    const double fd = (entropy_h(rho + delta, p) - entropy_h(rho - delta, p)) / (2.0 * delta);
    CHECK(h_prime(rho, p) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("Bregman gaps of entropy and pressure") {
  Params p;
  CHECK(relative_h(1.3, 1.3, p) == doctest::Approx(0.0));
  CHECK(relative_h(3.0, 1.0, p) == doctest::Approx(4.0));  // (ρ-r)² at γ=2, a=1
  CHECK(relative_p(1.3, 1.3, p) == doctest::Approx(0.0));
  CHECK(relative_p(3.0, 1.0, p) == doctest::Approx(4.0));
  CHECK_THROWS(relative_h(1.0, 0.0, p));

  // convexity and the proportionality h(ρ|r) = p(ρ|r)/(γ-1); the pressure
  // coefficient a is part of p itself
  for (double gamma : {1.4, 2.0, 3.0}) {
    for (double a : {0.5, 1.0, 2.0}) {
      Params q;
      q.gamma = gamma;
      q.a = a;
      for (double rho = 0.1; rho <= 10.0; rho += 0.9) {
        for (double r = 0.5; r <= 2.0; r += 0.3) {
          const double h = relative_h(rho, r, q);
          CHECK(h >= -1e-14);
          CHECK(h == doctest::Approx(relative_p(rho, r, q) / (gamma - 1.0)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("energy breakdown on pinned configurations") {
  const Grid g = Grid::make(1, 64);
  Params p;
  {
    State st{ScalarField(g, 1.0), VectorField(g), 0.0};
    const EnergyBreakdown e = energy(st, p);
    CHECK(e.total == doctest::Approx(1.0));
    CHECK(e.kinetic == doctest::Approx(0.0));
    CHECK(e.potential == doctest::Approx(0.0));
  }
  {
    Params q;
    q.b = -1.0;
    State st{ScalarField(g, 1.0), VectorField(g), 0.0};
    CHECK(energy(st, q).potential == doctest::Approx(0.0));  // constant density
  }
  {
    Params q;
    q.c = 1.0;
    State st{cosine_field(g, 1.0, 0.1), VectorField(g), 0.0};
    const EnergyBreakdown e = energy(st, q);
    CHECK(e.korteweg ==
          doctest::Approx(0.01 * std::numbers::pi * std::numbers::pi).epsilon(1e-12));
    CHECK(e.total == doctest::Approx(e.kinetic + e.internal + e.potential + e.korteweg).epsilon(1e-12));
  }
}

TEST_CASE("corrector velocity closed form and linearity") {
  const Grid g = Grid::make(1, 64);
  Params p;
  {
    p.epsilon = 0.3;
    const VectorField u = limit_velocity_U(ScalarField(g, 1.4), ScalarField(g), p);
    for (double v : u.comp[0]) CHECK(std::abs(v) < 1e-13);
  }
  {
    // r = 1 + 0.1cos(2πx), a=1, γ=2, b=c=0, ε=0.01: U = -ε∇(2r) = 0.004π sin(2πx)
    p.epsilon = 0.01;
    const ScalarField r = cosine_field(g, 1.0, 0.1);
    const VectorField u = limit_velocity_U(r, ScalarField(g), p);
    const ScalarField expected = sine_field(g, 0.0, 0.004 * std::numbers::pi);
    ScalarField ux(g);
    ux.values = u.comp[0];
    CHECK(max_err(ux, expected) < 1e-12);

    Params p2 = p;
    p2.epsilon = 0.02;
    const VectorField u2 = limit_velocity_U(r, ScalarField(g), p2);
    for (std::size_t i = 0; i < g.size(); ++i)
      CHECK(u2.comp[0][i] == doctest::Approx(2.0 * u.comp[0][i]).epsilon(1e-14));
  }
  CHECK_THROWS(limit_velocity_U(ScalarField(g, 0.0), ScalarField(g), p));
}

TEST_CASE("corrector velocity is curl-free in 2D") {
  const Grid g = Grid::make(2, 32);
  Params p;
  p.b = -1.0;
  p.c = 0.01;
  const ScalarField r = random_band_limited(g, 4, 42, 0.05) + ScalarField(g, 1.0);
  const VectorField u = limit_velocity_U(r, solve_poisson(r).phi, p);
  ScalarField ux(g), uy(g);
  ux.values = u.comp[0];
  uy.values = u.comp[1];
  // ∂x u_y - ∂y u_x
  const VectorField gx = gradient(ux);
  const VectorField gy = gradient(uy);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK(std::abs(gy.comp[0][i] - gx.comp[1][i]) < 1e-10);
}

TEST_CASE("error term vanishes for a resting corrector and isolates the flux term") {
  const Grid g = Grid::make(1, 64);
  Params p;
  p.epsilon = 0.1;
  const ScalarField r = cosine_field(g, 1.0, 0.2);
  {
    const VectorField zero(g);
    const VectorField e = error_term_e({r, r, r}, {zero, zero, zero}, p, 1e-3);
    for (double v : e.comp[0]) CHECK(std::abs(v) < 1e-12);
  }
  {
    VectorField u(g);
    u.comp[0] = sine_field(g, 0.1, 0.05).values;
    const VectorField e = error_term_e({r, r, r}, {u, u, u}, p, 1e-3);
    // steady data: e = (1/ε)div(rU⊗U); in 1D that is (1/ε)(r u²)'
    ScalarField ruu(g);
    for (std::size_t i = 0; i < g.size(); ++i)
      ruu.values[i] = r.values[i] * u.comp[0][i] * u.comp[0][i];
    VectorField flux(g);
    flux.comp[0] = ruu.values;
    const ScalarField expected = (1.0 / p.epsilon) * divergence(flux);
    ScalarField ex(g);
    ex.values = e.comp[0];
    CHECK(max_err(ex, expected) < 1e-10);
  }
}

TEST_CASE("relative entropy of perfectly prepared states vanishes") {
  const Grid g = Grid::make(1, 64);
  Params p;
  p.b = -1.0;
  p.c = 0.01;
  p.epsilon = 0.1;
  const ScalarField r = cosine_field(g, 1.0, 0.2);
  const VectorField u = limit_velocity_U(r, solve_poisson(r).phi, p);
  State st{r, pointwise_mul(r, u), 0.0};
  CHECK(std::abs(relative_entropy(st, r, p)) < 1e-12);
}

TEST_CASE("relative entropy reduces to the entropy gap without coupling") {
  const Grid g = Grid::make(1, 64);
  Params p;  // b = c = 0
  const ScalarField r = cosine_field(g, 1.0, 0.1);
  const ScalarField rho = cosine_field(g, 1.0, 0.25);
  const VectorField u = limit_velocity_U(r, ScalarField(g), p);
  State st{rho, pointwise_mul(rho, u), 0.0};
  const double e_rel = relative_entropy(st, r, p);
  ScalarField gap(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    gap.values[i] = relative_h(rho.values[i], r.values[i], p);
  CHECK(e_rel == doctest::Approx(integrate(gap)).epsilon(1e-10));
}

TEST_CASE("relative entropy is nonnegative for repulsive coupling") {
  const Grid g = Grid::make(1, 64);
  Params p;
  p.b = -1.0;
  p.c = 0.02;
  const ScalarField r = cosine_field(g, 1.0, 0.15);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const ScalarField rho = r + random_band_limited(g, 5, seed, 0.05);
    State st{rho, VectorField(g), 0.0};
    CHECK(relative_entropy(st, r, p) >= -1e-12);
  }
}

TEST_CASE("Wasserstein surrogate") {
  const Grid g = Grid::make(1, 64);
  Params p;
  const ScalarField r = cosine_field(g, 1.0, 0.2);
  CHECK(wasserstein_surrogate(r, r, p) == doctest::Approx(0.0));
  CHECK(wasserstein_surrogate(r + ScalarField(g, 0.1), r, p) == doctest::Approx(0.01).epsilon(1e-12));
  // contracting the perturbation toward r shrinks the surrogate
  const ScalarField pert = random_band_limited(g, 5, 77, 0.1);
  double prev = wasserstein_surrogate(r + pert, r, p);
  for (double s : {0.5, 0.25, 0.1}) {
    const double w = wasserstein_surrogate(r + s * pert, r, p);
    CHECK(w < prev);
    prev = w;
  }
}

TEST_CASE("entropy gap lower bounds") {
  {
    Params p;  // gamma = 2, a = 1
    const HBoundsReport rep = verify_h_lower_bounds(p, 400);
    CHECK(rep.c3_positive);
    CHECK(rep.c3 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rep.violations.empty());
  }
  {
    Params p;
    p.gamma = 3.0;
    const HBoundsReport rep = verify_h_lower_bounds(p, 400);
    CHECK(rep.c3_positive);
    CHECK(rep.c3 > 0.0);
  }
  {
    // numerator clamps when δ exceeds the whole scan range of |ρ-r|^γ
    Params p;
    const HBoundsReport rep = verify_h_lower_bounds(p, 100, 1.5, 0.5, 1.0, {10.0});
    REQUIRE(rep.c_of_delta.size() == 1);
    CHECK(rep.c_of_delta[0] == doctest::Approx(0.0));
  }
}

TEST_CASE("vacuum kinetic convention") {
  const Grid g = Grid::make(1, 64);
  Params p;
  State st{ScalarField(g, 0.0), VectorField(g), 0.0};
  CHECK(energy(st, p).kinetic == doctest::Approx(0.0));  // vacuum with zero momentum
  st.momentum.comp[0].assign(g.size(), 0.5);
  CHECK_THROWS(energy(st, p));  // momentum transported by vacuum
}
