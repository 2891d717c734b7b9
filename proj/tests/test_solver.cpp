#include <cmath>

#include "doctest.h"
#include "hjlab/oracle.hpp"
#include "hjlab/solver.hpp"
#include "hjlab/verify.hpp"

using namespace hjlab;

TEST_CASE("tiny coupled solve") {
  const Scenario sc = build_scenario(tiny_config());
  const CoupledSolution sol = solve_coupled(sc);
  REQUIRE(sol.converged);
  CHECK(sol.pair.psi.front().data == sc.psi0_p.data);
  CHECK(sol.pair.eta.back().data == sc.etaT_p.data);
  CHECK(sol.fixed_point_residual <= 2.0 * sc.cfg.tolerance);
  CHECK(sol.positive);
  // A converged pair is (numerically) fixed by one more sweep.
  const TrajectoryPair again = apply_gamma(sol.pair, sc);
  CHECK(regime_norm(difference(again, sol.pair), sc).total() <= 2.0 * sc.cfg.tolerance);
}

TEST_CASE("apply_gamma matches the oracle sweep") {
  const Scenario sc = build_scenario(tiny_config());
  TrajectoryPair pair = init_picard(sc);
  const std::size_t nv = sc.eq.G.nv, nx = sc.eq.G.nx;
  for (std::size_t n = 1; n + 1 < pair.psi.size(); ++n) {
    pair.psi[n] = pair.psi[n] + 0.01 * random_field(nv, nx, 40 + n, -1.0, 1.0);
    pair.eta[n] = pair.eta[n] + 0.01 * random_field(nv, nx, 80 + n, -1.0, 1.0);
  }
  const TrajectoryPair a = apply_gamma(pair, sc), b = oracle::apply_gamma(pair, sc);
  for (std::size_t n = 0; n < a.psi.size(); ++n) {
    CHECK(max_abs(a.psi[n] - b.psi[n]) <= 1e-12);
    CHECK(max_abs(a.eta[n] - b.eta[n]) <= 1e-12);
  }
}

TEST_CASE("physical variables round trip") {
  const Scenario sc = build_scenario(tiny_config());
  const CoupledSolution sol = solve_coupled(sc);
  REQUIRE(sol.converged);
  const PhysicalTrajectory phys = to_physical_variables(sol.pair, sc);
  std::vector<Field> psi, eta;
  from_physical_variables(phys, sc, psi, eta);
  for (std::size_t n = 0; n < psi.size(); ++n) {
    CHECK(max_abs(psi[n] - (sc.eq.G + sol.pair.psi[n])) <= 1e-12);
    CHECK(max_abs(eta[n] - (sc.eq.G + sol.pair.eta[n])) <= 1e-12);
  }
  // eta = 1 maps to p = alpha' |v|^2.
  TrajectoryPair one = sol.pair;
  for (Field& e : one.eta) e = Field(e.nv, e.nx, 1.0) - sc.eq.G;
  const PhysicalTrajectory p1 = to_physical_variables(one, sc);
  for (std::size_t iv = 0; iv < sc.grid.velocity.size(); ++iv)
    CHECK(p1.p[0](iv, 0) == doctest::Approx(sc.eq.alpha_prime * sc.grid.velocity.speed2[iv]).epsilon(1e-14));
}

TEST_CASE("degenerate terminal data") {
  ScenarioConfig c = tiny_config();
  c.terminal_kind = TerminalKind::degenerate;
  c.time_step = c.substep = 0.01;
  c.horizon = 0.02;
  const Scenario sc = build_scenario(c);
  const Field target = Field(sc.eq.G.nv, sc.eq.G.nx, 1.0) - sc.eq.G;
  CHECK(max_abs(sc.etaT_p - target) <= 1e-15);
  const CoupledSolution sol = solve_coupled(sc);
  REQUIRE(sol.converged);
  const std::vector<Field> fwd = integrate_forward_boltzmann(sc);
  for (std::size_t n = 0; n < fwd.size(); ++n) {
    CHECK(max_abs(fwd[n] - sol.pair.psi[n]) <= 1e-10);
    CHECK(max_abs(sol.pair.eta[n] - target) <= 1e-13);
  }
}

TEST_CASE("zero data") {
  ScenarioConfig c = tiny_config();
  c.initial_kind = InitialKind::zero;
  c.terminal_kind = TerminalKind::zero;
  const Scenario sc = build_scenario(c);
  CHECK(max_abs(sc.psi0_p) == 0.0);
  CHECK(max_abs(sc.etaT_p) == 0.0);
  CHECK(solve_coupled(sc).converged);
}

TEST_CASE("configuration validation") {
  ScenarioConfig c = tiny_config();
  c.horizon = 0.17;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = tiny_config();
  c.tolerance = 0.0;
  CHECK_THROWS_AS(validate(c), ValidationError);
  c = tiny_config();
  c.alpha = 0.5;
  CHECK_THROWS_AS(build_scenario(c), ValidationError);
}
