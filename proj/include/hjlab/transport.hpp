#pragma once

#include <vector>

#include "hjlab/collision.hpp"
#include "hjlab/grid.hpp"

namespace hjlab {

enum class Direction { forward, backward };

// Semi-Lagrangian shift: value at (x, v) becomes f(x - tau v, v), periodic in x.
Field free_transport(const Field& f, const PhaseGrid& g, double tau);

// D1(s) f = e^{-nu s} f(x -+ s v); nu is the per-velocity frequency.
Field d1_apply(const Field& f, double s, Direction dir, const std::vector<double>& nu, const PhaseGrid& g);

struct SemigroupStepper {
  Direction dir = Direction::forward;
  double dt_sub = 0.01;
  const PhaseGrid* grid = nullptr;
  const KOperator* K = nullptr;
  bool zero_K = false;  // test hook: drop the compact part
};

// Substep sizes covering [0, s]: full dt_sub steps plus a final remainder.
std::vector<double> substeps(double s, double dt_sub);

// Exponential Euler substep for y' = A y + K y + F with A = -+v.grad - nu:
// y <- S_h[e^{-nu h} y + (1 - e^{-nu h})/nu (K y + F)].
void exponential_substep(Field& y, double h, const Field* source, const SemigroupStepper& st);

Field semigroup_step(const Field& f, double delta, const SemigroupStepper& st);
Field semigroup_apply(const Field& f, double s, const SemigroupStepper& st);
Field d2_residual(const Field& f, double s, const SemigroupStepper& st);

// Propagates over one interval of length delta with the source interpolated
// linearly from F0 (interval start) to F1 (interval end).
Field propagate(const Field& y0, double delta, const Field& F0, const Field& F1, const SemigroupStepper& st);

}  // namespace hjlab
