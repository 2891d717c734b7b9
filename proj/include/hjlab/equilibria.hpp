#pragma once

#include <vector>

#include "hjlab/grid.hpp"

namespace hjlab {

struct EquilibriumSet {
  double alpha = 0.0;
  double alpha_prime = 0.25;
  Field M, E, B, G;
};

EquilibriumSet make_equilibria(const PhaseGrid& g, double alpha);

// Discrete L2 inner product with cell-volume weights dx^d dv^d.
double inner(const Field& a, const Field& b, const PhaseGrid& g);
// Integral of f over phase space.
double integral(const Field& f, const PhaseGrid& g);

struct KernelBasis {
  std::vector<Field> f;  // orthonormal, x-independent
};

KernelBasis make_kernel_basis(const PhaseGrid& g, const EquilibriumSet& eq);
// The unnormalized generators G, G v_i, G |v|^2.
std::vector<Field> kernel_generators(const PhaseGrid& g, const EquilibriumSet& eq);
Field project_off_kernel(const Field& f, const KernelBasis& basis, const PhaseGrid& g);

double weighted_sup_norm(const Field& f, const VelocityGrid& vg, double beta);

using Trajectory = std::vector<Field>;

enum class NormMode { polynomial, exponential };

struct NormReport {
  double beta = 0.0;
  double sigma = 0.0;
  NormMode mode = NormMode::polynomial;
  bool reversed = false;
  std::vector<double> per_node;   // unweighted L_beta^inf norms at s_n
  std::vector<double> weighted;   // time-weighted entries
  double value = 0.0;             // max of weighted
};

// Time nodes s_n = n * t / N for N = traj.size() - 1.
NormReport trajectory_norm(const Trajectory& traj, const VelocityGrid& vg, double t, double beta, double sigma,
                           NormMode mode, bool reversed);

Trajectory reverse_time(const Trajectory& traj);

}  // namespace hjlab
