#include <cmath>

#include "doctest.h"
#include "hjlab/functional.hpp"
#include "hjlab/oracle.hpp"
#include "hjlab/verify.hpp"
#include "support.hpp"

using namespace hjlab;

TEST_CASE("hamiltonian special cases") {
  const Scenario sc = build_scenario(tiny_config());
  const std::size_t nv = sc.eq.G.nv, nx = sc.eq.G.nx;
  const Field phi = random_field(nv, nx, 1, 0.1, 1.0);
  CHECK(hamiltonian(phi, Field(nv, nx, 0.0), sc.table, sc.grid) == 0.0);
  CHECK(std::abs(hamiltonian_sym(phi, Field(nv, nx, 1.0), sc.table, sc.grid)) <= 1e-13);
  const Field p = random_field(nv, nx, 2, -0.5, 0.5);
  CHECK(std::abs(hamiltonian(phi, p, sc.table, sc.grid) - oracle::hamiltonian(phi, p, sc.grid)) <= 1e-12);
  CHECK(std::abs(hamiltonian_sym(phi, p, sc.table, sc.grid) - oracle::hamiltonian_sym(phi, p, sc.grid)) <= 1e-12);
  const Field big(nv, nx, 1.0);
  Field wild = random_field(nv, nx, 3, -1.0, 1.0);
  for (double& x : wild.data) x *= 1e3;
  CHECK_THROWS_AS(hamiltonian(big, wild, sc.table, sc.grid), std::overflow_error);
}

TEST_CASE("delta_p vanishes for orthogonal omega") {
  const Scenario sc = build_scenario(tiny_config());
  const Field p = random_field(sc.eq.G.nv, sc.eq.G.nx, 4, -1.0, 1.0);
  CHECK(delta_p(p, sc.grid, 0, Vec{1, 0, 0}, Vec{0, 0, 0}, Vec{0, 1, 0}) == 0.0);
}

TEST_CASE("functional formulas match the oracle") {
  const Scenario sc = build_scenario(tiny_config());
  const CoupledSolution sol = solve_coupled(sc);
  REQUIRE(sol.converged);
  const auto [def, dec] = oracle::functional(sol.pair, sc);
  CHECK(std::abs(evaluate_functional(sol, sc) - def) <= 1e-12);
  CHECK(std::abs(functional_decomposed(sol, sc) - dec) <= 1e-12);
}

TEST_CASE("stationary functional") {
  const PhaseGrid g = test::make_grid(3, 4.0 * std::sqrt(2.0), 13);
  const EquilibriumSet eq = make_equilibria(g, 0.0);
  Field q = Field::zeros(g);
  for (std::size_t iv = 0; iv < q.nv; ++iv) q(iv, 0) = 0.1 * g.velocity.speed2[iv];
  const double exact = 0.3975424859373684;  // -1 + 0.8^{-3/2}
  CHECK(std::abs(stationary_functional(q, eq, g) - exact) / exact <= 0.01);
  const double mass = stationary_functional(Field::zeros(g), eq, g);
  Field c(q.nv, 1, 0.2);
  CHECK(stationary_functional(c, eq, g) == doctest::Approx(std::exp(0.2) * (1.0 + mass) - 1.0).epsilon(1e-14));
}

TEST_CASE("trapezoid") {
  CHECK(trapezoid({1.0, 2.0, 3.0}, 0.5) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(trapezoid({4.0}, 0.5) == 0.0);
}

TEST_CASE("convolution integral") {
  // Reference from adaptive quadrature of (1+10-s)^{-2}(1+s)^{-2} on [0, 10].
  CHECK(oracle::convolution_integral(2.0, 2.0, 10.0, 4000) == doctest::Approx(0.018176946128110705).epsilon(1e-9));
  const oracle::ConvolutionReport r = oracle::convolution_bound_check(2.0, 2.0, {1, 2, 4, 8, 16}, 4000);
  REQUIRE(r.constants.size() == 5);
  CHECK(r.constants[0] == doctest::Approx(0.8551983292207084).epsilon(1e-8));
  CHECK(r.constants[4] == doctest::Approx(2.240602645015289).epsilon(1e-8));
}

TEST_CASE("zero-perturbation HJ residual") {
  ScenarioConfig c = tiny_config();
  c.initial_kind = InitialKind::zero;
  c.terminal_kind = TerminalKind::zero;
  const auto r = hj_residual(c, {0.1}, 0.05);
  REQUIRE(r.size() == 1);
  CHECK(r[0].converged);
  CHECK(std::isfinite(r[0].residual_abs));
}
