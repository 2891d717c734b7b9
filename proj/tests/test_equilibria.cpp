#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hjlab/equilibria.hpp"
#include "hjlab/verify.hpp"
#include "support.hpp"

using namespace hjlab;

TEST_CASE("equilibria at alpha = 0") {
  const PhaseGrid g = test::make_grid(3, 4.0, 9);
  const EquilibriumSet eq = make_equilibria(g, 0.0);
  const int o = g.velocity.find(IVec{0, 0, 0});
  CHECK(eq.M(o, 0) == doctest::Approx(0.06349363593424097).epsilon(1e-14));
  CHECK(eq.alpha_prime == 0.25);
  for (std::size_t iv = 0; iv < g.velocity.size(); ++iv) {
    const double v2 = g.velocity.speed2[iv];
    const double G = std::pow(2.0 * std::numbers::pi, -1.5) * std::exp(-0.25 * v2);
    CHECK(eq.G(iv, 0) == doctest::Approx(G).epsilon(1e-13));
    CHECK(eq.M(iv, 0) / eq.B(iv, 0) == doctest::Approx(eq.G(iv, 0)).epsilon(1e-13));
    CHECK(eq.E(iv, 0) * eq.B(iv, 0) == doctest::Approx(eq.G(iv, 0)).epsilon(1e-13));
  }
}

TEST_CASE("alpha prime") {
  const PhaseGrid g = test::make_grid(3, 4.0, 9);
  CHECK(make_equilibria(g, 0.25).alpha_prime == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("kernel basis is orthonormal and projection removes it") {
  const PhaseGrid g = test::make_grid(3, 4.0, 9);
  const EquilibriumSet eq = make_equilibria(g, 0.0);
  const KernelBasis kb = make_kernel_basis(g, eq);
  REQUIRE(kb.f.size() == 5);
  for (std::size_t i = 0; i < kb.f.size(); ++i)
    for (std::size_t j = 0; j < kb.f.size(); ++j)
      CHECK(inner(kb.f[i], kb.f[j], g) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));

  const Field f = hadamard(eq.G, random_field(g.velocity.size(), 1, 5, -1.0, 1.0));
  const Field h = project_off_kernel(f, kb, g);
  for (const Field& q : kernel_generators(g, eq)) CHECK(std::abs(inner(q, h, g)) < 1e-14);
  CHECK(max_abs(project_off_kernel(h, kb, g) - h) < 1e-15);
  // G + h with h orthogonal: the perturbation comes back.
  CHECK(max_abs(project_off_kernel(eq.G + h, kb, g) - h) < 1e-10);
}

TEST_CASE("weighted sup norm of G") {
  // Brute-force scan over the n = 17 grid: max G(v)(1+|v|)^5.
  const PhaseGrid g = test::make_grid(3, 4.0, 17);
  const EquilibriumSet eq = make_equilibria(g, 0.0);
  CHECK(weighted_sup_norm(eq.G, g.velocity, 5.0) == doctest::Approx(7.1157786161925705).epsilon(1e-12));
}

TEST_CASE("trajectory norms") {
  const PhaseGrid g = test::make_grid(3, 4.0, 9);
  const std::size_t nv = g.velocity.size();
  const int o = g.velocity.find(IVec{0, 0, 0});
  Field a(nv, 1), b(nv, 1);
  a(o, 0) = 2.0;
  b(o, 0) = 1.5;
  const Trajectory tr{a, b};
  // Nodes s = 0 and s = 1: max(2, 1.5 * 2^1.5).
  const NormReport p = trajectory_norm(tr, g.velocity, 1.0, 5.0, 1.5, NormMode::polynomial, false);
  CHECK(p.value == doctest::Approx(1.5 * std::pow(2.0, 1.5)).epsilon(1e-15));
  // Reversed: a sits at time t - 0 = 1.
  const NormReport r = trajectory_norm(tr, g.velocity, 1.0, 5.0, 1.5, NormMode::polynomial, true);
  CHECK(r.value == doctest::Approx(2.0 * std::pow(2.0, 1.5)).epsilon(1e-15));
  const NormReport e = trajectory_norm(tr, g.velocity, 1.0, 5.0, 0.5, NormMode::exponential, false);
  CHECK(e.value == doctest::Approx(std::max(2.0, 1.5 * std::exp(0.5))).epsilon(1e-15));
  CHECK(reverse_time(reverse_time(tr))[0].data == a.data);
}
