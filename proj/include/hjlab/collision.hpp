#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hjlab/equilibria.hpp"
#include "hjlab/grid.hpp"

namespace hjlab {

// One record stands for the ordered triple (v, v*, omega) with (v* - v).omega > 0
// and for its mirror (v*, v, -omega), which carries the same bracket and weight.
struct CollisionEntry {
  std::int32_t v = 0;
  std::int32_t v_star = 0;
  std::int32_t omega = 0;
  double weight = 0.0;  // (v* - v).omega * w_omega * dv^d
  std::ptrdiff_t base_p = 0;   // padded lattice offset of the lower corner of v'
  std::ptrdiff_t base_sp = 0;  // same for v*'
  std::array<double, 3> frac_p{0, 0, 0};
  std::array<double, 3> frac_sp{0, 0, 0};
};

struct Stencil {
  int count = 0;
  std::array<int, 8> node{};     // sentinel nv for zero-weight corners
  std::array<double, 8> weight{};
};

struct CollisionTable {
  int dim = 3;
  std::size_t nv = 0;
  std::vector<CollisionEntry> entries;
  std::vector<int> index_map;
  std::array<std::ptrdiff_t, 8> corner_offset{};

  std::size_t triple_count() const { return 2 * entries.size(); }
  Stencil stencil(std::ptrdiff_t base, const std::array<double, 3>& frac) const;
  Stencil stencil_p(const CollisionEntry& e) const { return stencil(e.base_p, e.frac_p); }
  Stencil stencil_sp(const CollisionEntry& e) const { return stencil(e.base_sp, e.frac_sp); }
};

CollisionTable build_collision_table(const VelocityGrid& vg, const SphereQuadrature& sq);

// (1/2) sum w eta(v*) [psi1' psi2*' + psi2' psi1*' - psi1 psi2* - psi2 psi1*].
Field biased_collision(const Field& eta, const Field& psi1, const Field& psi2, const CollisionTable& table);

// Q_eta(psi, psi) and Q_psi(eta, eta) in one table pass.
struct CollisionPair {
  Field q_psi;  // Q_eta(psi, psi)
  Field q_eta;  // Q_psi(eta, eta)
};
CollisionPair coupled_collisions(const Field& psi, const Field& eta, const CollisionTable& table);

// nu(v) = sum over retained triples of w G(v*)^2, replicated over x.
Field collision_frequency(const EquilibriumSet& eq, const CollisionTable& table);

// 2 Q_G(f, G) + nu f, evaluated through biased_collision.
Field linearized_K(const Field& f, const EquilibriumSet& eq, const CollisionTable& table);

// Dense matrix form of K acting on velocity rows, assembled once per table.
struct KOperator {
  std::size_t nv = 0;
  std::vector<double> matrix;  // row-major nv x nv
  std::vector<double> nu;      // per velocity node
  Field apply(const Field& f) const;
  void apply(const Field& f, Field& out) const;
};
KOperator assemble_K(const EquilibriumSet& eq, const CollisionTable& table);

// 2 Q_{eta_p}(psi_p, G) + Q_G(psi_p, psi_p) + Q_{eta_p}(psi_p, psi_p).
Field nonlinearity(const Field& psi_p, const Field& eta_p, const EquilibriumSet& eq, const CollisionTable& table);

struct FrequencyFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double nu_min = 0.0;
  double nu_max = 0.0;
};
FrequencyFit fit_frequency(const Field& nu, const VelocityGrid& vg);

}  // namespace hjlab
