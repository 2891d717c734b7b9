#include "hjlab/functional.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hjlab {

namespace {

double gather_row(const Stencil& s, const Field& f, std::size_t ix) {
  double acc = 0.0;
  for (int c = 0; c < s.count; ++c)
    if (s.node[c] < static_cast<int>(f.nv)) acc += s.weight[c] * f(static_cast<std::size_t>(s.node[c]), ix);
  return acc;
}

double relative(double a, double b) {
  const double den = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / den;
}

}  // namespace

double delta_p(const Field& p, const PhaseGrid& g, std::size_t ix, const Vec& v, const Vec& v_star, const Vec& omega) {
  const auto [vp, vsp] = collide(v, v_star, omega);
  const Vec x = g.space.position(ix);
  return interpolate(p, g, x, vp) + interpolate(p, g, x, vsp) - interpolate(p, g, x, v) -
         interpolate(p, g, x, v_star);
}

double hamiltonian(const Field& phi, const Field& p, const CollisionTable& table, const PhaseGrid& g) {
  check_shape(phi, p, "hamiltonian");
  double total = 0.0;
  for (std::size_t ix = 0; ix < phi.nx; ++ix) {
    double acc = 0.0;
    for (const CollisionEntry& e : table.entries) {
      const Stencil sp = table.stencil_p(e), ssp = table.stencil_sp(e);
      const double dp = gather_row(sp, p, ix) + gather_row(ssp, p, ix) - p(e.v, ix) - p(e.v_star, ix);
      if (dp > 700.0)
        throw std::overflow_error("hamiltonian: e^{dp} overflows; use a smaller perturbation");
      // Each record covers two ordered triples with equal contributions.
      acc += e.weight * phi(e.v, ix) * phi(e.v_star, ix) * std::expm1(dp);
    }
    total += acc;
  }
  return total * g.volume();
}

HamiltonianForms hamiltonian_forms(const Field& psi, const Field& eta, const CollisionTable& table,
                                   const PhaseGrid& g) {
  check_shape(psi, eta, "hamiltonian_sym");
  HamiltonianForms h;
  for (std::size_t ix = 0; ix < psi.nx; ++ix) {
    double s = 0.0, a = 0.0, b = 0.0;
    for (const CollisionEntry& e : table.entries) {
      const Stencil sp = table.stencil_p(e), ssp = table.stencil_sp(e);
      const double pp = psi(e.v, ix) * psi(e.v_star, ix);
      const double ee = eta(e.v, ix) * eta(e.v_star, ix);
      const double dpsi = gather_row(sp, psi, ix) * gather_row(ssp, psi, ix) - pp;
      const double deta = gather_row(sp, eta, ix) * gather_row(ssp, eta, ix) - ee;
      s += e.weight * dpsi * deta;
      a += e.weight * pp * deta;
      b += e.weight * dpsi * ee;
    }
    h.symmetric += -0.5 * s;
    h.eta_sided += a;
    h.psi_sided += b;
  }
  h.symmetric *= g.volume();
  h.eta_sided *= g.volume();
  h.psi_sided *= g.volume();
  return h;
}

double hamiltonian_sym(const Field& psi, const Field& eta, const CollisionTable& table, const PhaseGrid& g) {
  return hamiltonian_forms(psi, eta, table, g).symmetric;
}

double trapezoid(const std::vector<double>& v, double dt) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return s * dt;
}

double evaluate_functional(const CoupledSolution& sol, const Scenario& sc) {
  if (!sol.converged) throw std::invalid_argument("evaluate_functional: solution did not converge");
  const Field& G = sc.eq.G;
  const auto& P = sol.pair;
  const std::size_t N = P.psi.size() - 1;
  const Field psi_init = G + sc.psi0_p;
  double value = -1.0 + inner(psi_init, G + P.eta[0], sc.grid);
  std::vector<double> integrand(N + 1, 0.0);
  for (std::size_t n = 0; n <= N; ++n) {
    const Field psi = G + P.psi[n];
    const Field eta = G + P.eta[n];
    const CollisionPair cc = coupled_collisions(psi, eta, sc.table);
    Field ds_eta = Field(psi.nv, psi.nx) - cc.q_eta;
    double forcing = 0.0;
    if (sc.has_forcing()) {
      const Field& phi = sc.forcing[n];
      ds_eta = ds_eta + hadamard(eta, phi);
      forcing = inner(phi, hadamard(psi, eta), sc.grid);
    }
    integrand[n] = inner(ds_eta, psi, sc.grid) - forcing + hamiltonian_sym(psi, eta, sc.table, sc.grid);
  }
  return value + trapezoid(integrand, sc.dt);
}

double functional_decomposed(const CoupledSolution& sol, const Scenario& sc) {
  if (!sol.converged) throw std::invalid_argument("functional_decomposed: solution did not converge");
  const Field& G = sc.eq.G;
  const auto& P = sol.pair;
  const std::size_t N = P.psi.size() - 1;
  double value = -1.0 + inner(G + P.eta[N], G + P.psi[N], sc.grid);
  std::vector<double> integrand(N + 1, 0.0);
  for (std::size_t n = 0; n <= N; ++n) {
    const Field psi = G + P.psi[n];
    const Field eta = G + P.eta[n];
    integrand[n] = inner(eta, biased_collision(eta, psi, psi, sc.table), sc.grid);
  }
  return value - 0.5 * trapezoid(integrand, sc.dt);
}

double stationary_functional(const Field& g_hat, const EquilibriumSet& eq, const PhaseGrid& g) {
  check_shape(g_hat, eq.M, "stationary_functional");
  double s = 0.0;
  for (std::size_t i = 0; i < g_hat.size(); ++i) s += std::exp(g_hat.data[i]) * eq.M.data[i];
  return -1.0 + s * g.volume();
}

FunctionalReport functional_report(const CoupledSolution& sol, const Scenario& sc) {
  FunctionalReport r;
  r.horizon = sc.cfg.horizon;
  r.converged = sol.converged;
  r.status = sol.status;
  r.residual = std::numeric_limits<double>::quiet_NaN();
  r.residual_abs = std::numeric_limits<double>::quiet_NaN();
  r.i_inf = stationary_functional(sc.g_hat, sc.eq, sc.grid);
  if (!sol.converged) {
    r.i_def = r.i_decomp = r.discrepancy = r.gap = r.hamiltonian_terminal = std::numeric_limits<double>::quiet_NaN();
    return r;
  }
  r.i_def = evaluate_functional(sol, sc);
  r.i_decomp = functional_decomposed(sol, sc);
  r.discrepancy = relative(r.i_def, r.i_decomp);
  r.gap = std::abs(r.i_def - r.i_inf);
  const std::size_t N = sol.pair.psi.size() - 1;
  r.hamiltonian_terminal =
      hamiltonian_sym(sc.eq.G + sol.pair.psi[N], sc.eq.G + sol.pair.eta[N], sc.table, sc.grid);
  return r;
}

std::vector<FunctionalReport> hj_residual(const ScenarioConfig& cfg, const std::vector<double>& t_list,
                                          double delta_t) {
  if (!(delta_t > 0.0)) throw ValidationError("scenario.functional.hj_dt", "must be positive");
  std::vector<FunctionalReport> out;
  for (double t : t_list) {
    ScenarioConfig a = cfg, b = cfg;
    a.horizon = t;
    b.horizon = t + delta_t;
    // Both horizons must sit on the time grid; refine the step when delta_t is not a multiple of it.
    const double k = std::ceil(delta_t / cfg.time_step - 1e-9);
    if (std::abs(k * cfg.time_step - delta_t) > 1e-9 * delta_t) a.time_step = b.time_step = delta_t / k;
    const Scenario sa = build_scenario(a);
    const Scenario sb = build_scenario(b);
    const CoupledSolution ra = solve_coupled(sa);
    FunctionalReport rep = functional_report(ra, sa);
    if (!ra.converged) {
      out.push_back(rep);
      continue;
    }
    const CoupledSolution rb = solve_coupled(sb);
    if (!rb.converged) {
      rep.status = "diverged at t + delta_t: " + rb.status;
      rep.converged = false;
      out.push_back(rep);
      continue;
    }
    const double ib = evaluate_functional(rb, sb);
    const double slope = (ib - rep.i_def) / delta_t;
    rep.residual_abs = std::abs(slope - rep.hamiltonian_terminal);
    rep.residual = rep.residual_abs / std::max(std::abs(rep.hamiltonian_terminal), 1e-300);
    out.push_back(rep);
  }
  return out;
}

}  // namespace hjlab
