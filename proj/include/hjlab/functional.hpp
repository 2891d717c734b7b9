#pragma once

#include <vector>

#include "hjlab/collision.hpp"
#include "hjlab/solver.hpp"

namespace hjlab {

// p(x,v') + p(x,v*') - p(x,v) - p(x,v*) at space node ix.
double delta_p(const Field& p, const PhaseGrid& g, std::size_t ix, const Vec& v, const Vec& v_star, const Vec& omega);

// (1/2) sum w phi phi* (e^{dp} - 1) dx^d dv^d.  Throws std::overflow_error for wild p.
double hamiltonian(const Field& phi, const Field& p, const CollisionTable& table, const PhaseGrid& g);

struct HamiltonianForms {
  double symmetric = 0.0;  // -(1/4) sum w (psi'psi*' - psi psi*)(eta'eta*' - eta eta*)
  double eta_sided = 0.0;  // (1/2) sum w psi psi* (eta'eta*' - eta eta*)
  double psi_sided = 0.0;  // (1/2) sum w (psi'psi*' - psi psi*) eta eta*
};
HamiltonianForms hamiltonian_forms(const Field& psi, const Field& eta, const CollisionTable& table,
                                   const PhaseGrid& g);
double hamiltonian_sym(const Field& psi, const Field& eta, const CollisionTable& table, const PhaseGrid& g);

// Trapezoid rule on a uniform grid with spacing dt.
double trapezoid(const std::vector<double>& values, double dt);

// -1 + <f0 B^-1, eta(0)> + <<D_s eta, psi>> - <<phi, psi eta>> + int H' ds.
double evaluate_functional(const CoupledSolution& sol, const Scenario& sc);
// -1 + <eta(t), psi(t)> - (1/2) <<eta, Q_eta(psi, psi)>>.
double functional_decomposed(const CoupledSolution& sol, const Scenario& sc);
// -1 + <e^g, M>.
double stationary_functional(const Field& g_hat, const EquilibriumSet& eq, const PhaseGrid& g);

struct FunctionalReport {
  double horizon = 0.0;
  double i_def = 0.0;
  double i_decomp = 0.0;
  double discrepancy = 0.0;  // relative
  double i_inf = 0.0;
  double gap = 0.0;
  double residual = 0.0;       // relative mild-HJ residual, NaN when not computed
  double residual_abs = 0.0;
  double hamiltonian_terminal = 0.0;
  bool converged = false;
  std::string status;
};

FunctionalReport functional_report(const CoupledSolution& sol, const Scenario& sc);

// For each t: |(I(t + dt) - I(t))/dt - H'(psi_t(t), eta_t(t))| from two full solves.
std::vector<FunctionalReport> hj_residual(const ScenarioConfig& cfg, const std::vector<double>& t_list,
                                          double delta_t);

}  // namespace hjlab
