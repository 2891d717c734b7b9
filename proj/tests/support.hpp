#pragma once

#include "hjlab/grid.hpp"

namespace hjlab::test {

inline PhaseGrid make_grid(int d, double R, int n, int m = 1, int order = 0) {
  PhaseGrid g;
  g.velocity = build_velocity_grid(d, R, n);
  g.space = build_space_grid(d, m);
  g.sphere = build_sphere_quadrature(d, order > 0 ? order : (d == 2 ? 8 : 7));
  return g;
}

inline int node_index(const VelocityGrid& vg, IVec k) { return vg.find(k); }

}  // namespace hjlab::test
