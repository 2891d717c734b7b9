#include <cmath>

#include "doctest.h"
#include "hjlab/collision.hpp"
#include "hjlab/oracle.hpp"
#include "hjlab/verify.hpp"
#include "support.hpp"

using namespace hjlab;

namespace {

struct Tiny {
  PhaseGrid g;
  EquilibriumSet eq;
  CollisionTable table;
  explicit Tiny(int n = 5, double R = 2.0, int m = 1, int order = 8)
      : g(test::make_grid(2, R, n, m, order)), eq(make_equilibria(g, 0.0)),
        table(build_collision_table(g.velocity, g.sphere)) {}
  std::size_t nv() const { return g.velocity.size(); }
  std::size_t nx() const { return g.space.size(); }
};

}  // namespace

TEST_CASE("triple count on the smallest grid") {
  // Brute force over ordered (v, v*, omega) with (v* - v).omega > 0, d = 2, n = 3, R = 1, four
  // circle nodes: every retained collision swaps a pair along an axis.
  const Tiny t(3, 1.0, 1, 4);
  CHECK(t.table.triple_count() == 12);
  CHECK(oracle::triple_count(t.g.velocity, t.g.sphere) == 12);
}

TEST_CASE("table entries stay in the ball") {
  const Tiny t;
  for (const CollisionEntry& e : t.table.entries) {
    CHECK(e.weight > 0.0);
    for (const Stencil& s : {t.table.stencil_p(e), t.table.stencil_sp(e)}) {
      double w = 0.0;
      for (int c = 0; c < s.count; ++c) {
        if (s.weight[c] != 0.0) CHECK(s.node[c] < static_cast<int>(t.nv()));
        w += s.weight[c];
      }
      CHECK(w == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("biased collision matches the oracle") {
  const Tiny t(5, 2.0, 2);
  const Field eta = random_field(t.nv(), t.nx(), 1, 0.2, 1.2);
  const Field a = random_field(t.nv(), t.nx(), 2, -1.0, 1.0);
  const Field b = random_field(t.nv(), t.nx(), 3, -1.0, 1.0);
  CHECK(max_abs(biased_collision(eta, a, b, t.table) - oracle::collision(eta, a, b, t.g)) <= 1e-13);
  const Tiny s(3, 1.0, 1, 4);
  const Field e3 = random_field(s.nv(), 1, 4, 0.2, 1.2);
  const Field a3 = random_field(s.nv(), 1, 5, -1.0, 1.0);
  CHECK(max_abs(biased_collision(e3, a3, a3, s.table) - oracle::collision(e3, a3, a3, s.g)) <= 1e-13);
}

TEST_CASE("biased collision symmetry and degeneracy") {
  const Tiny t;
  const Field eta = random_field(t.nv(), 1, 6, 0.2, 1.2);
  const Field a = random_field(t.nv(), 1, 7, -1.0, 1.0);
  const Field b = random_field(t.nv(), 1, 8, -1.0, 1.0);
  CHECK(biased_collision(eta, a, b, t.table).data == biased_collision(eta, b, a, t.table).data);
  const Field one(t.nv(), 1, 1.0);
  CHECK(max_abs(biased_collision(a, one, one, t.table)) <= 1e-13);
  CHECK(max_abs(biased_collision(Field(t.nv(), 1, 0.0), a, b, t.table)) == 0.0);
  const CollisionPair cp = coupled_collisions(a, eta, t.table);
  CHECK(max_abs(cp.q_psi - biased_collision(eta, a, a, t.table)) <= 1e-15);
  CHECK(max_abs(cp.q_eta - biased_collision(a, eta, eta, t.table)) <= 1e-15);
}

TEST_CASE("frequency and K") {
  const Tiny t;
  const Field nu = collision_frequency(t.eq, t.table);
  const std::vector<double> onu = oracle::frequency(t.eq.G, t.g);
  for (std::size_t i = 0; i < t.nv(); ++i) {
    CHECK(nu(i, 0) > 0.0);
    CHECK(std::abs(nu(i, 0) - onu[i]) <= 1e-13);
  }
  const KOperator K = assemble_K(t.eq, t.table);
  const Field f = random_field(t.nv(), 1, 9, -1.0, 1.0);
  CHECK(max_abs(K.apply(f) - linearized_K(f, t.eq, t.table)) <= 1e-12);
  Field ko = 2.0 * oracle::collision(t.eq.G, f, t.eq.G, t.g);
  for (std::size_t i = 0; i < t.nv(); ++i) ko(i, 0) += onu[i] * f(i, 0);
  CHECK(max_abs(linearized_K(f, t.eq, t.table) - ko) <= 1e-10);
}

TEST_CASE("nonlinearity expansion") {
  const Tiny t;
  const Field pp = 0.1 * random_field(t.nv(), 1, 10, -1.0, 1.0);
  const Field ep = 0.1 * random_field(t.nv(), 1, 11, -1.0, 1.0);
  const Field G = t.eq.G;
  const Field lhs = biased_collision(G + ep, G + pp, G + pp, t.table);
  const Field rhs = nonlinearity(pp, ep, t.eq, t.table) + 2.0 * biased_collision(G, pp, G, t.table) +
                    biased_collision(G + ep, G, G, t.table);
  CHECK(max_abs(lhs - rhs) <= 1e-12);
  CHECK(max_abs(nonlinearity(Field(t.nv(), 1), Field(t.nv(), 1), t.eq, t.table)) == 0.0);
}
