#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hjlab/grid.hpp"
#include "hjlab/solver.hpp"

namespace hjlab::oracle {

inline constexpr std::size_t kNodeCap = 200;
inline constexpr double kEps = 1e-30;

struct OracleReport {
  std::string name;
  double main = 0.0;
  double oracle = 0.0;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
};
OracleReport compare(std::string name, double main, double oracle);

// Naive quadruple loop over (x, v, v*, omega) with the shared truncation rule.
Field collision(const Field& eta, const Field& psi1, const Field& psi2, const PhaseGrid& g);
std::size_t triple_count(const VelocityGrid& vg, const SphereQuadrature& sq);
std::vector<double> frequency(const Field& G, const PhaseGrid& g);
double hamiltonian(const Field& phi, const Field& p, const PhaseGrid& g);
double hamiltonian_sym(const Field& psi, const Field& eta, const PhaseGrid& g);
double inner(const Field& a, const Field& b, const PhaseGrid& g);

// One Picard sweep recomputed with the naive operators.
TrajectoryPair apply_gamma(const TrajectoryPair& pair, const Scenario& sc);

// Both functional formulas (defining, decomposed) with independent loops.
std::pair<double, double> functional(const TrajectoryPair& pair, const Scenario& sc);

struct ConvolutionReport {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  std::vector<double> times;
  std::vector<double> integrals;
  std::vector<double> constants;  // integral * (1+t)^{min sigma}
  double witnessed = 0.0;         // max constant over the sweep
  double spread = 0.0;            // max / min constant
};
// Composite Simpson on [0, t] with n_points intervals (rounded up to even).
double convolution_integral(double sigma1, double sigma2, double t, int n_points);
ConvolutionReport convolution_bound_check(double sigma1, double sigma2, const std::vector<double>& times,
                                          int n_points);

}  // namespace hjlab::oracle
