#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hjlab/config.hpp"
#include "hjlab/report.hpp"
#include "hjlab/solver.hpp"

namespace hjlab {

// Discretization defects of quantities that vanish in the continuum.
struct InvarianceDefects {
  int nodes_per_axis = 0;
  double dv = 0.0;
  std::vector<double> conservation;  // |<G h, Q_G(f, f)>| for h = 1, v_1..v_d, |v|^2
  double conservation_max = 0.0;
  double equilibrium = 0.0;   // sup |Q_G(G, G)|
  double hamiltonian_gg = 0.0;  // |H'(G, G)|
  double stationary = 0.0;    // |H(e^g M, g)| for g = 0.1 |v|^2
};

InvarianceDefects invariance_defects(const ScenarioConfig& cfg, int nodes_per_axis);

// Reduction factor per halving of dv implied by two measurements.
double halving_factor(double coarse, double fine, double dv_coarse, double dv_fine);

// Seeded uniform field in [lo, hi); same values on every platform.
Field random_field(std::size_t nv, std::size_t nx, std::uint64_t seed, double lo, double hi);

// Small instance used for oracle comparisons: d = 2, R = 2, n = 5, eight directions.
ScenarioConfig tiny_config();

// Runs the invariant and property checks of every module on the configured grids.
std::vector<CheckRecord> verify_suite(const RunConfig& rc);

}  // namespace hjlab
