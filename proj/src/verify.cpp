#include "hjlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <numbers>
#include <string>

#include "hjlab/collision.hpp"
#include "hjlab/functional.hpp"
#include "hjlab/oracle.hpp"
#include "hjlab/transport.hpp"

namespace hjlab {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t bit_mismatches(const Field& a, const Field& b) {
  if (!a.same_shape(b)) return std::max(a.size(), b.size()) + 1;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::memcmp(&a.data[i], &b.data[i], sizeof(double)) != 0) ++n;
  return n;
}

std::size_t bit_mismatches(const std::vector<Field>& a, const std::vector<Field>& b) {
  if (a.size() != b.size()) return 1 + std::max(a.size(), b.size());
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += bit_mismatches(a[i], b[i]);
  return n;
}

double max_diff(const Field& a, const Field& b) { return max_abs(a - b); }

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

PhaseGrid phase_grid(const ScenarioConfig& c) {
  PhaseGrid g;
  g.space = build_space_grid(c.dim, c.space_nodes);
  g.velocity = build_velocity_grid(c.dim, c.resolved_radius(), c.nodes_per_axis);
  g.sphere = build_sphere_quadrature(c.dim, c.sphere_order);
  return g;
}

// x -> -x on the periodic lattice.
Field reflect_space(const Field& f, const SpaceGrid& sg) {
  Field out(f.nv, f.nx);
  for (std::size_t ix = 0; ix < f.nx; ++ix) {
    IVec j = sg.coords(ix);
    for (int a = 0; a < sg.dim; ++a) j[a] = (sg.nodes_per_axis - j[a]) % sg.nodes_per_axis;
    const std::size_t jx = sg.index(j);
    for (std::size_t iv = 0; iv < f.nv; ++iv) out(iv, jx) = f(iv, ix);
  }
  return out;
}

Field speed2_field(const PhaseGrid& g, double scale) {
  Field f = Field::zeros(g);
  for (std::size_t iv = 0; iv < f.nv; ++iv)
    for (std::size_t ix = 0; ix < f.nx; ++ix) f(iv, ix) = scale * g.velocity.speed2[iv];
  return f;
}

void phase_grid_checks(const PhaseGrid& g, std::vector<CheckRecord>& out) {
  const VelocityGrid& vg = g.velocity;
  std::size_t unmatched = 0, outside = 0;
  bool origin = false;
  for (std::size_t i = 0; i < vg.size(); ++i) {
    IVec m{-vg.lattice[i][0], -vg.lattice[i][1], -vg.lattice[i][2]};
    if (vg.find(m) < 0) ++unmatched;
    if (vg.speed2[i] > vg.radius * vg.radius * (1.0 + 1e-12)) ++outside;
    if (vg.lattice[i] == IVec{0, 0, 0}) origin = true;
  }
  out.push_back(check_le("phase_grid.velocity.antipodal_unmatched", unmatched, 0));
  out.push_back(check_ge("phase_grid.velocity.origin_present", origin ? 1 : 0, 1));
  out.push_back(check_le("phase_grid.velocity.nodes_outside_ball", outside, 0));

  const SphereQuadrature& sq = g.sphere;
  const double area = sq.dim == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  double wsum = 0.0;
  for (double w : sq.weights) wsum += w;
  out.push_back(check_le("phase_grid.sphere.weight_sum_rel_error", std::abs(wsum - area) / area, 1e-12));
  const std::size_t h = sq.hemisphere();
  double odd = 0.0;
  std::size_t antipodal = 0;
  for (int a = 0; a < sq.dim; ++a) {
    double m1 = 0.0, m3 = 0.0;
    for (std::size_t k = 0; k < h; ++k) {
      m1 += sq.weights[k] * sq.nodes[k][a] + sq.weights[k + h] * sq.nodes[k + h][a];
      m3 += sq.weights[k] * std::pow(sq.nodes[k][a], 3) + sq.weights[k + h] * std::pow(sq.nodes[k + h][a], 3);
    }
    odd = std::max({odd, std::abs(m1), std::abs(m3)});
  }
  for (std::size_t k = 0; k < h; ++k) {
    bool ok = sq.weights[k] == sq.weights[k + h];
    for (int a = 0; a < 3; ++a) ok = ok && sq.nodes[k + h][a] == -sq.nodes[k][a];
    if (!ok) ++antipodal;
  }
  out.push_back(check_le("phase_grid.sphere.odd_moments", odd, 0.0));
  out.push_back(check_le("phase_grid.sphere.antipodal_unmatched", antipodal, 0));

  std::mt19937_64 rng(11);
  double inv = 0.0, mom = 0.0, en = 0.0;
  for (int s = 0; s < 1000; ++s) {
    Vec v{}, w{}, om{};
    double norm = 0.0;
    for (int a = 0; a < g.velocity.dim; ++a) {
      v[a] = 8.0 * unit(rng) - 4.0;
      w[a] = 8.0 * unit(rng) - 4.0;
      om[a] = 2.0 * unit(rng) - 1.0;
      norm += om[a] * om[a];
    }
    for (double& x : om) x /= std::sqrt(norm);
    const auto [vp, wp] = collide(v, w, om);
    const auto [vb, wb] = collide(vp, wp, om);
    double e0 = 0.0, e1 = 0.0;
    for (int a = 0; a < 3; ++a) {
      inv = std::max({inv, std::abs(vb[a] - v[a]), std::abs(wb[a] - w[a])});
      mom = std::max(mom, std::abs(vp[a] + wp[a] - v[a] - w[a]));
      e0 += v[a] * v[a] + w[a] * w[a];
      e1 += vp[a] * vp[a] + wp[a] * wp[a];
    }
    en = std::max(en, std::abs(e1 - e0) / e0);
  }
  out.push_back(check_le("phase_grid.collide.involution", inv, 1e-12));
  out.push_back(check_le("phase_grid.collide.momentum", mom, 1e-13));
  out.push_back(check_le("phase_grid.collide.energy_rel", en, 1e-13));
}

void table_checks(const PhaseGrid& g, const CollisionTable& table, std::vector<CheckRecord>& out) {
  const VelocityGrid& vg = g.velocity;
  std::size_t bad_primes = 0, bad_corners = 0, same = 0;
  double wmin = std::numeric_limits<double>::infinity();
  const double r2 = vg.radius * vg.radius * (1.0 + 1e-12);
  for (const CollisionEntry& e : table.entries) {
    wmin = std::min(wmin, e.weight);
    if (e.v == e.v_star) ++same;
    const auto [vp, wp] = collide(vg.nodes[e.v], vg.nodes[e.v_star], g.sphere.nodes[e.omega]);
    double a = 0.0, b = 0.0;
    for (int i = 0; i < 3; ++i) {
      a += vp[i] * vp[i];
      b += wp[i] * wp[i];
    }
    if (a > r2 || b > r2) ++bad_primes;
    for (const Stencil& s : {table.stencil_p(e), table.stencil_sp(e)})
      for (int c = 0; c < s.count; ++c)
        if (s.weight[c] != 0.0 && s.node[c] >= static_cast<int>(table.nv)) ++bad_corners;
  }
  out.push_back(check_le("phase_grid.table.primes_outside_ball", bad_primes, 0));
  out.push_back(check_le("collision.table.stencil_nodes_outside_ball", bad_corners, 0));
  out.push_back(check_ge("collision.table.min_weight", table.entries.empty() ? 0.0 : wmin, 0.0));
  out.push_back(check_le("collision.table.coincident_pairs", same, 0));
  const CollisionTable again = build_collision_table(g.velocity, g.sphere);
  std::size_t diff = again.entries.size() == table.entries.size() ? 0 : 1;
  for (std::size_t i = 0; diff == 0 && i < table.entries.size(); ++i) {
    const CollisionEntry &a = table.entries[i], &b = again.entries[i];
    if (a.v != b.v || a.v_star != b.v_star || a.omega != b.omega || a.base_p != b.base_p ||
        a.base_sp != b.base_sp || std::memcmp(&a.weight, &b.weight, sizeof(double)) != 0 || a.frac_p != b.frac_p ||
        a.frac_sp != b.frac_sp)
      ++diff;
  }
  out.push_back(check_le("collision.table.rebuild_mismatches", diff, 0));
}

void equilibria_checks(const Scenario& sc, std::vector<CheckRecord>& out) {
  const PhaseGrid& g = sc.grid;
  const EquilibriumSet& eq = sc.eq;
  double mb = 0.0, ebg = 0.0, gf = 0.0;
  const int d = g.velocity.dim;
  for (std::size_t iv = 0; iv < eq.G.nv; ++iv)
    for (std::size_t ix = 0; ix < eq.G.nx; ++ix) {
      const double G = eq.G(iv, ix);
      mb = std::max(mb, rel(eq.M(iv, ix) / eq.B(iv, ix), G));
      ebg = std::max(ebg, rel(eq.E(iv, ix) * eq.B(iv, ix), G));
      const double ref = std::pow(2.0 * std::numbers::pi, -0.5 * d) *
                         std::exp(-0.5 * (0.5 - eq.alpha) * g.velocity.speed2[iv]);
      gf = std::max(gf, rel(G, ref));
    }
  out.push_back(check_le("equilibria.M_over_B_rel", mb, 1e-13));
  out.push_back(check_le("equilibria.E_times_B_rel", ebg, 1e-13));
  out.push_back(check_le("equilibria.G_closed_form_rel", gf, 1e-13));

  const auto& f = sc.basis.f;
  double gram = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = 0; j < f.size(); ++j)
      gram = std::max(gram, std::abs(inner(f[i], f[j], g) - (i == j ? 1.0 : 0.0)));
  out.push_back(check_le("equilibria.kernel.gram_identity", gram, 1e-10));
  double span = 0.0;
  for (const Field& q : kernel_generators(g, eq)) {
    const double scale = std::max(max_abs(q), 1e-300);
    span = std::max(span, max_abs(project_off_kernel(q, sc.basis, g)) / scale);
  }
  out.push_back(check_le("equilibria.kernel.span_residual", span, 1e-10));

  const Field r = random_field(eq.G.nv, eq.G.nx, 21, -1.0, 1.0);
  const Field pr = project_off_kernel(r, sc.basis, g);
  double orth = 0.0;
  for (const Field& q : f) orth = std::max(orth, std::abs(inner(pr, q, g)));
  out.push_back(check_le("equilibria.projection.orthogonality", orth, 1e-10));
  out.push_back(check_le("equilibria.projection.idempotence", max_diff(project_off_kernel(pr, sc.basis, g), pr),
                         1e-12));

  Trajectory traj;
  for (int n = 0; n < 4; ++n) traj.push_back(random_field(eq.G.nv, eq.G.nx, 100 + n, -1.0, 1.0));
  out.push_back(check_le("equilibria.reverse_involution_mismatches",
                         bit_mismatches(reverse_time(reverse_time(traj)), traj), 0));
  const double t = 1.5, sigma = 1.5, beta = sc.cfg.beta;
  const NormReport nr = trajectory_norm(traj, g.velocity, t, beta, sigma, NormMode::polynomial, true);
  double direct = 0.0;
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const double s = t * static_cast<double>(n) / static_cast<double>(traj.size() - 1);
    direct = std::max(direct, std::pow(1.0 + (t - s), sigma) * weighted_sup_norm(traj[n], g.velocity, beta));
  }
  out.push_back(check_le("equilibria.reversed_norm_rel", rel(nr.value, direct), 1e-14));
}

void collision_checks(const Scenario& sc, std::vector<CheckRecord>& out) {
  const PhaseGrid& g = sc.grid;
  const CollisionTable& table = sc.table;
  const EquilibriumSet& eq = sc.eq;
  const std::size_t nv = eq.G.nv, nx = eq.G.nx;
  const Field eta = eq.G + 0.1 * hadamard(eq.G, random_field(nv, nx, 31, -1.0, 1.0));
  const Field p1 = eq.G + 0.1 * hadamard(eq.G, random_field(nv, nx, 32, -1.0, 1.0));
  const Field p2 = eq.G + 0.1 * hadamard(eq.G, random_field(nv, nx, 33, -1.0, 1.0));
  out.push_back(check_le("collision.symmetry_mismatches",
                         bit_mismatches(biased_collision(eta, p1, p2, table), biased_collision(eta, p2, p1, table)), 0));
  const Field ones(nv, nx, 1.0);
  out.push_back(check_le("collision.degeneracy_eta_one", max_abs(biased_collision(p1, ones, ones, table)), 1e-13));
  out.push_back(check_le("collision.zero_bias", max_abs(biased_collision(Field(nv, nx, 0.0), p1, p1, table)), 0.0));

  const Field nu = collision_frequency(eq, table);
  double numin = std::numeric_limits<double>::infinity();
  for (double x : nu.data) numin = std::min(numin, x);
  out.push_back(check_ge("collision.frequency_min", numin, 1e-300));
  const FrequencyFit fit = fit_frequency(nu, g.velocity);
  out.push_back(check_ge("collision.frequency_fit_c1", fit.c1, 1e-300));
  out.push_back(check_info("collision.frequency_fit_c2", fit.c2));
  out.push_back(check_info("collision.K_on_G_minus_nu_G", max_diff(linearized_K(eq.G, eq, table), hadamard(nu, eq.G))));
  out.push_back(check_le("collision.K_dense_vs_direct",
                         max_diff(sc.K.apply(p1), linearized_K(p1, eq, table)) / std::max(max_abs(p1), 1e-300), 1e-12));

  // Boundedness ratio ||(1+|v|)^-1 Q||_beta / (||eta|| ||psi1|| ||psi2||) over seeded fields.
  const double beta = sc.cfg.beta;
  double ratio = 0.0;
  for (int s = 0; s < 3; ++s) {
    const Field a = hadamard(eq.G, random_field(nv, nx, 40 + s, -1.0, 1.0));
    const Field b = hadamard(eq.G, random_field(nv, nx, 50 + s, -1.0, 1.0));
    const Field c = hadamard(eq.G, random_field(nv, nx, 60 + s, -1.0, 1.0));
    Field q = biased_collision(a, b, c, table);
    for (std::size_t iv = 0; iv < nv; ++iv)
      for (std::size_t ix = 0; ix < nx; ++ix) q(iv, ix) /= 1.0 + std::sqrt(g.velocity.speed2[iv]);
    const double den = weighted_sup_norm(a, g.velocity, beta) * weighted_sup_norm(b, g.velocity, beta) *
                       weighted_sup_norm(c, g.velocity, beta);
    ratio = std::max(ratio, weighted_sup_norm(q, g.velocity, beta) / den);
  }
  out.push_back(check_info("collision.boundedness_ratio", ratio));
}

void transport_checks(const Scenario& sc, const std::string& pre, std::vector<CheckRecord>& out) {
  const PhaseGrid& g = sc.grid;
  const std::size_t nv = sc.eq.G.nv, nx = sc.eq.G.nx;
  const Field f = hadamard(sc.eq.G, random_field(nv, nx, 71, 0.5, 1.5));
  out.push_back(check_le(pre + "tau_zero_mismatches", bit_mismatches(free_transport(f, g, 0.0), f), 0));
  if (g.space.nodes_per_axis == 1)
    out.push_back(check_le(pre + "homogeneous_mismatches", bit_mismatches(free_transport(f, g, 0.37), f), 0));
  const double m0 = integral(f, g);
  out.push_back(check_le(pre + "mass_rel", rel(integral(free_transport(f, g, 0.37), g), m0), 1e-12));

  const double s = 0.3;
  const Field d1 = d1_apply(f, s, Direction::forward, sc.K.nu, g);
  double numin = std::numeric_limits<double>::infinity();
  for (double x : sc.K.nu) numin = std::min(numin, x);
  out.push_back(check_le(pre + "d1_bound_ratio",
                         weighted_sup_norm(d1, g.velocity, sc.cfg.beta) /
                             (std::exp(-numin * s) * weighted_sup_norm(f, g.velocity, sc.cfg.beta)),
                         1.0 + 1e-12));
  const Field back = d1_apply(f, s, Direction::backward, sc.K.nu, g);
  const Field mirror = reflect_space(d1_apply(reflect_space(f, g.space), s, Direction::forward, sc.K.nu, g), g.space);
  out.push_back(check_le(pre + "backward_mirror_mismatches", bit_mismatches(back, mirror), 0));

  const SemigroupStepper st = sc.stepper(Direction::forward);
  const double h = st.dt_sub;
  out.push_back(check_le(pre + "semigroup_property_mismatches",
                         bit_mismatches(semigroup_apply(f, 5 * h, st), semigroup_apply(semigroup_apply(f, 3 * h, st), 2 * h, st)),
                         0));
  SemigroupStepper zk = st;
  zk.zero_K = true;
  // Composed interpolating shifts are not a shift once m > 1; report only.
  const double d2z = max_abs(d2_residual(f, 0.1, zk)) / max_abs(f);
  out.push_back(g.space.nodes_per_axis == 1 ? check_le(pre + "d2_zero_K", d2z, 1e-13) : check_info(pre + "d2_zero_K", d2z));
  out.push_back(check_le(pre + "zero_field", max_abs(semigroup_step(Field(nv, nx, 0.0), sc.cfg.time_step, st)), 0.0));
  out.push_back(check_info(pre + "kernel_step_drift",
                           max_diff(semigroup_step(sc.eq.G, sc.cfg.time_step, st), sc.eq.G) / max_abs(sc.eq.G)));
  double d2c = 0.0;
  Field damped = f;
  for (std::size_t iv = 0; iv < nv; ++iv)
    for (std::size_t ix = 0; ix < nx; ++ix) damped(iv, ix) /= 1.0 + std::sqrt(g.velocity.speed2[iv]);
  const double den = weighted_sup_norm(damped, g.velocity, sc.cfg.beta);
  for (double t : {0.1, 0.5, 1.0}) d2c = std::max(d2c, weighted_sup_norm(d2_residual(f, t, st), g.velocity, sc.cfg.beta) / den);
  out.push_back(check_info(pre + "d2_constant", d2c));
}

// Swapping initial and terminal data and reversing time maps a forward sweep onto a backward one.
double symmetry_echo(const Scenario& sc, const TrajectoryPair& pair) {
  Scenario sw = sc;
  std::swap(sw.psi0_p, sw.etaT_p);
  TrajectoryPair p2;
  p2.horizon = pair.horizon;
  p2.psi = reverse_time(pair.eta);
  p2.eta = reverse_time(pair.psi);
  p2.psi.front() = sw.psi0_p;
  p2.eta.back() = sw.etaT_p;
  const TrajectoryPair a = apply_gamma(pair, sc);
  const TrajectoryPair b = apply_gamma(p2, sw);
  double m = 0.0;
  const Trajectory ra = reverse_time(a.eta), rb = reverse_time(a.psi);
  for (std::size_t n = 0; n < ra.size(); ++n) {
    m = std::max(m, max_diff(ra[n], b.psi[n]));
    m = std::max(m, max_diff(rb[n], b.eta[n]));
  }
  return m;
}

void solver_checks(const RunConfig& rc, std::vector<CheckRecord>& out) {
  ScenarioConfig c = rc.scenario;
  const int steps = std::max(1, static_cast<int>(std::llround(std::min(c.horizon, 1.0) / c.time_step)));
  c.horizon = steps * c.time_step;
  const Scenario sc = build_scenario(c);
  const CoupledSolution sol = solve_coupled(sc);
  out.push_back(check_ge("solver.converged", sol.converged ? 1 : 0, 1));
  out.push_back(check_le("solver.boundary_pin_mismatches",
                         bit_mismatches(sol.pair.psi.front(), sc.psi0_p) + bit_mismatches(sol.pair.eta.back(), sc.etaT_p),
                         0));
  if (!sol.converged) return;
  out.push_back(check_le("solver.fixed_point_residual", sol.fixed_point_residual, 2.0 * c.tolerance));
  out.push_back(check_info("solver.max_ratio_after_first", sol.max_ratio_after_first));
  out.push_back(check_ge("solver.positive", sol.positive ? 1 : 0, 1));

  if (c.space_nodes == 1 && !sc.has_forcing())
    out.push_back(check_le("solver.symmetry_echo", symmetry_echo(sc, sol.pair), 1e-15));

  // Change of variables round trip on the converged pair.
  const PhysicalTrajectory phys = to_physical_variables(sol.pair, sc);
  std::vector<Field> psi, eta;
  from_physical_variables(phys, sc, psi, eta);
  double rt = 0.0;
  for (std::size_t n = 0; n < psi.size(); ++n)
    for (std::size_t i = 0; i < psi[n].size(); ++i) {
      const double g = sc.eq.G.data[i];
      rt = std::max(rt, rel(psi[n].data[i], g + sol.pair.psi[n].data[i]));
      rt = std::max(rt, rel(eta[n].data[i], g + sol.pair.eta[n].data[i]));
    }
  out.push_back(check_le("solver.physical_round_trip_rel", rt, 1e-12));

  const std::size_t last = sol.pair.psi.size() - 1;
  const Field psi_t = sc.eq.G + sol.pair.psi[last], eta_t = sc.eq.G + sol.pair.eta[last];
  const HamiltonianForms hf = hamiltonian_forms(psi_t, eta_t, sc.table, sc.grid);
  const double hscale = std::max({std::abs(hf.symmetric), std::abs(hf.eta_sided), std::abs(hf.psi_sided)});
  out.push_back(check_le("hj.one_sided_forms_rel",
                         std::max(std::abs(hf.eta_sided - hf.symmetric), std::abs(hf.psi_sided - hf.symmetric)) / hscale,
                         1e-10));
  const double h_phys = hamiltonian(phys.phi[last], phys.p[last], sc.table, sc.grid);
  out.push_back(check_le("hj.H_vs_Hprime_rel", rel(h_phys, hf.symmetric), 1e-8));
  const FunctionalReport fr = functional_report(sol, sc);
  out.push_back(check_le("hj.functional_identity_rel", fr.discrepancy, 1e-8));
  out.push_back(check_info("hj.functional_value", fr.i_def));

  // Degenerate terminal data: the coupled solve reduces to forward Boltzmann.
  // eta_p = 1 - G is not small, so Picard only contracts on a short, finely stepped window.
  ScenarioConfig dc = c;
  dc.terminal_kind = TerminalKind::degenerate;
  dc.forcing = ForcingKind::none;
  dc.regime = Regime::theorem1;
  dc.time_step = dc.substep = std::min(c.substep, 0.01);
  dc.horizon = 2 * dc.time_step;
  const Scenario ds = build_scenario(dc);
  const CoupledSolution dsol = solve_coupled(ds);
  out.push_back(check_ge("solver.degenerate_converged", dsol.converged ? 1 : 0, 1));
  const std::vector<Field> fwd = integrate_forward_boltzmann(ds);
  double dd = 0.0, de = 0.0;
  const Field one_minus_g = Field(ds.eq.G.nv, ds.eq.G.nx, 1.0) - ds.eq.G;
  for (std::size_t n = 0; n < fwd.size() && n < dsol.pair.psi.size(); ++n) {
    dd = std::max(dd, max_diff(fwd[n], dsol.pair.psi[n]));
    de = std::max(de, max_diff(dsol.pair.eta[n], one_minus_g));
  }
  out.push_back(check_le("solver.degenerate_forward_equivalence", dd, 1e-10));
  out.push_back(check_le("solver.degenerate_eta_constant", de, 1e-13));
}

void functional_checks(const Scenario& sc, std::vector<CheckRecord>& out) {
  const PhaseGrid& g = sc.grid;
  const std::size_t nv = sc.eq.G.nv, nx = sc.eq.G.nx;
  const Field phi = hadamard(sc.eq.G, random_field(nv, nx, 81, 0.5, 1.5));
  out.push_back(check_le("hj.hamiltonian_p_zero", std::abs(hamiltonian(phi, Field(nv, nx, 0.0), sc.table, g)), 0.0));
  out.push_back(check_le("hj.hamiltonian_sym_eta_one",
                         std::abs(hamiltonian_sym(phi, Field(nv, nx, 1.0), sc.table, g)), 1e-13));
  Field eg = sc.g_hat;
  for (double& x : eg.data) x = std::exp(x);
  out.push_back(check_info("hj.stationary_value", std::abs(hamiltonian(hadamard(sc.eq.M, eg), sc.g_hat, sc.table, g))));
  Field zero_g = Field(nv, nx, 0.0);
  out.push_back(check_info("hj.stationary_functional_mass_error", std::abs(stationary_functional(zero_g, sc.eq, g))));
  if (g.velocity.dim == 3) {
    const Field gq = speed2_field(g, 0.1);
    const double exact = -1.0 + std::pow(0.8, -1.5);
    out.push_back(check_info("hj.stationary_closed_form_rel", rel(stationary_functional(gq, sc.eq, g), exact)));
  }
}

void oracle_checks(std::vector<CheckRecord>& out) {
  const Scenario sc = build_scenario(tiny_config());
  const PhaseGrid& g = sc.grid;
  const std::size_t nv = sc.eq.G.nv, nx = sc.eq.G.nx;
  const Field eta = random_field(nv, nx, 91, 0.2, 1.2);
  const Field p1 = random_field(nv, nx, 92, -1.0, 1.0);
  const Field p2 = random_field(nv, nx, 93, -1.0, 1.0);
  out.push_back(check_le("oracle.collision", max_diff(biased_collision(eta, p1, p2, sc.table), oracle::collision(eta, p1, p2, g)),
                         1e-13));
  out.push_back(check_le("oracle.triple_count_diff",
                         std::abs(static_cast<double>(sc.table.triple_count()) -
                                  static_cast<double>(oracle::triple_count(g.velocity, g.sphere))),
                         0));
  const std::vector<double> onu = oracle::frequency(sc.eq.G, g);
  double dnu = 0.0;
  for (std::size_t i = 0; i < onu.size(); ++i) dnu = std::max(dnu, std::abs(onu[i] - sc.K.nu[i]));
  out.push_back(check_le("oracle.frequency", dnu, 1e-13));
  const Field p = random_field(nv, nx, 94, -0.5, 0.5);
  out.push_back(check_le("oracle.hamiltonian",
                         std::abs(hamiltonian(eta, p, sc.table, g) - oracle::hamiltonian(eta, p, g)), 1e-12));
  out.push_back(check_le("oracle.hamiltonian_sym",
                         std::abs(hamiltonian_sym(p1, eta, sc.table, g) - oracle::hamiltonian_sym(p1, eta, g)), 1e-12));
  double ip = 0.0;
  for (const Field& q : kernel_generators(g, sc.eq)) ip = std::max(ip, std::abs(inner(q, p1, g) - oracle::inner(q, p1, g)));
  out.push_back(check_le("oracle.inner", ip, 1e-14));

  // K integrand evaluated directly: 2 Q_G(f, G) + nu f.
  const Field kd = linearized_K(p1, sc.eq, sc.table);
  Field ko = 2.0 * oracle::collision(sc.eq.G, p1, sc.eq.G, g);
  for (std::size_t iv = 0; iv < nv; ++iv)
    for (std::size_t ix = 0; ix < nx; ++ix) ko(iv, ix) += onu[iv] * p1(iv, ix);
  out.push_back(check_le("oracle.linearized_K", max_diff(kd, ko), 1e-10));

  // Expansion of the cubic collision term around G.
  const Field psi_p = 0.1 * p1, eta_p = 0.1 * p2;
  const Field lhs = biased_collision(sc.eq.G + eta_p, sc.eq.G + psi_p, sc.eq.G + psi_p, sc.table);
  const Field rhs = nonlinearity(psi_p, eta_p, sc.eq, sc.table) + 2.0 * biased_collision(sc.eq.G, psi_p, sc.eq.G, sc.table) +
                    biased_collision(sc.eq.G + eta_p, sc.eq.G, sc.eq.G, sc.table);
  out.push_back(check_le("collision.expansion_identity", max_diff(lhs, rhs), 1e-12));

  TrajectoryPair pair = init_picard(sc);
  for (std::size_t n = 1; n + 1 < pair.psi.size(); ++n) {
    pair.psi[n] = pair.psi[n] + 0.01 * random_field(nv, nx, 200 + n, -1.0, 1.0);
    pair.eta[n] = pair.eta[n] + 0.01 * random_field(nv, nx, 300 + n, -1.0, 1.0);
  }
  const TrajectoryPair a = apply_gamma(pair, sc);
  const TrajectoryPair b = oracle::apply_gamma(pair, sc);
  double dg = 0.0;
  for (std::size_t n = 0; n < a.psi.size(); ++n)
    dg = std::max({dg, max_diff(a.psi[n], b.psi[n]), max_diff(a.eta[n], b.eta[n])});
  out.push_back(check_le("oracle.apply_gamma", dg, 1e-12));

  const CoupledSolution sol = solve_coupled(sc);
  const auto [odef, odec] = oracle::functional(sol.pair, sc);
  out.push_back(check_le("oracle.functional_def", std::abs(evaluate_functional(sol, sc) - odef), 1e-12));
  out.push_back(check_le("oracle.functional_decomposed", std::abs(functional_decomposed(sol, sc) - odec), 1e-12));

  const oracle::ConvolutionReport cr = oracle::convolution_bound_check(2.0, 2.0, {1, 2, 4, 8, 16}, 4000);
  out.push_back(check_info("oracle.convolution_constant", cr.witnessed));
  out.push_back(check_le("oracle.convolution_spread", cr.spread, 1.5));
}

void refinement_checks(const RunConfig& rc, std::vector<CheckRecord>& out) {
  const auto& ladder = rc.refinement_ladder;
  if (ladder.size() < 2) return;
  std::vector<InvarianceDefects> defs;
  for (int n : ladder) defs.push_back(invariance_defects(rc.scenario, n));
  static const char* hname[] = {"1", "v1", "v2", "v3"};
  for (std::size_t k = 0; k < defs.size(); ++k) {
    const InvarianceDefects& d = defs[k];
    const std::string p = "refinement.n" + std::to_string(d.nodes_per_axis) + ".";
    out.push_back(check_info(p + "conservation_max", d.conservation_max));
    out.push_back(check_info(p + "equilibrium", d.equilibrium));
    out.push_back(check_info(p + "hamiltonian_gg", d.hamiltonian_gg));
    out.push_back(check_info(p + "stationary", d.stationary));
  }
  for (std::size_t k = 1; k < defs.size(); ++k) {
    const InvarianceDefects &a = defs[k - 1], &b = defs[k];
    const std::string p =
        "refinement.n" + std::to_string(a.nodes_per_axis) + "_n" + std::to_string(b.nodes_per_axis) + ".halving_factor.";
    const std::size_t nh = a.conservation.size();
    for (std::size_t h = 0; h < nh; ++h) {
      const std::string name = h + 1 == nh ? "speed2" : hname[h];
      out.push_back(check_in(p + "conservation_" + name, halving_factor(a.conservation[h], b.conservation[h], a.dv, b.dv),
                             3.2, 4.8));
    }
    out.push_back(check_in(p + "equilibrium", halving_factor(a.equilibrium, b.equilibrium, a.dv, b.dv), 3.2, 4.8));
    out.push_back(check_in(p + "hamiltonian_gg", halving_factor(a.hamiltonian_gg, b.hamiltonian_gg, a.dv, b.dv), 3.2, 4.8));
    out.push_back(check_in(p + "stationary", halving_factor(a.stationary, b.stationary, a.dv, b.dv), 3.2, 4.8));
  }
}

}  // namespace

Field random_field(std::size_t nv, std::size_t nx, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  Field f(nv, nx);
  for (double& x : f.data) x = lo + (hi - lo) * unit(rng);
  return f;
}

ScenarioConfig tiny_config() {
  ScenarioConfig c;
  c.dim = 2;
  c.radius = 2.0;
  c.nodes_per_axis = 5;
  c.space_nodes = 2;
  c.sphere_order = 8;
  c.horizon = 0.2;
  c.time_step = 0.05;
  c.substep = 0.025;
  c.perturbation_scale = 0.05;
  c.initial_modulation = 0.3;
  c.terminal_modulation = 0.3;
  return c;
}

double halving_factor(double coarse, double fine, double dv_coarse, double dv_fine) {
  if (!(coarse > 0.0) || !(fine > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  const double p = std::log(coarse / fine) / std::log(dv_coarse / dv_fine);
  return std::pow(2.0, p);
}

InvarianceDefects invariance_defects(const ScenarioConfig& cfg, int nodes_per_axis) {
  ScenarioConfig c = cfg;
  c.nodes_per_axis = nodes_per_axis;
  c.space_nodes = 1;
  const PhaseGrid g = phase_grid(c);
  const EquilibriumSet eq = make_equilibria(g, c.alpha);
  const CollisionTable table = build_collision_table(g.velocity, g.sphere);
  InvarianceDefects d;
  d.nodes_per_axis = nodes_per_axis;
  d.dv = g.velocity.dv;

  // f = G + 0.1 h with h the seeded polynomial preset: the same function on every grid.
  const Field f = eq.G + 0.1 * preset_perturbation(g, eq, 3, 0.0);
  const Field q = biased_collision(eq.G, f, f, table);
  for (const Field& gen : kernel_generators(g, eq)) {
    d.conservation.push_back(std::abs(inner(gen, q, g)));
    d.conservation_max = std::max(d.conservation_max, d.conservation.back());
  }
  d.equilibrium = max_abs(biased_collision(eq.G, eq.G, eq.G, table));
  d.hamiltonian_gg = std::abs(hamiltonian_sym(eq.G, eq.G, table, g));
  const Field gq = speed2_field(g, 0.1);
  Field phi = eq.M;
  for (std::size_t i = 0; i < phi.size(); ++i) phi.data[i] *= std::exp(gq.data[i]);
  d.stationary = std::abs(hamiltonian(phi, gq, table, g));
  return d;
}

std::vector<CheckRecord> verify_suite(const RunConfig& rc) {
  validate(rc.scenario);
  std::vector<CheckRecord> out;
  ScenarioConfig short_cfg = rc.scenario;
  const int steps = std::max(1, static_cast<int>(std::llround(std::min(short_cfg.horizon, 1.0) / short_cfg.time_step)));
  short_cfg.horizon = steps * short_cfg.time_step;
  const Scenario sc = build_scenario(short_cfg);
  phase_grid_checks(sc.grid, out);
  table_checks(sc.grid, sc.table, out);
  equilibria_checks(sc, out);
  collision_checks(sc, out);
  transport_checks(sc, "transport.", out);
  if (sc.grid.space.nodes_per_axis == 1) transport_checks(build_scenario(tiny_config()), "transport.periodic.", out);
  functional_checks(sc, out);
  oracle_checks(out);
  solver_checks(rc, out);
  refinement_checks(rc, out);
  return out;
}

}  // namespace hjlab
