#include "hjlab/solver.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hjlab {

double ScenarioConfig::resolved_sigma() const {
  if (sigma > 0.0) return sigma;
  return regime == Regime::theorem1 ? 1.5 : 0.5;
}

double ScenarioConfig::resolved_radius() const {
  if (radius > 0.0) return radius;
  return 4.0 / std::sqrt(0.5 - alpha);
}

int ScenarioConfig::time_steps() const {
  if (horizon == 0.0) return 0;
  return static_cast<int>(std::llround(horizon / time_step));
}

void validate(const ScenarioConfig& c) {
  if (c.dim != 2 && c.dim != 3) throw ValidationError("grid.dimension", "must be 2 or 3");
  if (c.nodes_per_axis < 3 || c.nodes_per_axis % 2 == 0)
    throw ValidationError("grid.velocity.nodes_per_axis", "must be odd and at least 3");
  if (c.radius < 0.0 || !std::isfinite(c.radius)) throw ValidationError("grid.velocity.radius", "must be positive");
  if (c.space_nodes < 1) throw ValidationError("grid.space.nodes_per_axis", "must be at least 1");
  if (!(c.alpha < 0.5) || !std::isfinite(c.alpha)) throw ValidationError("equilibrium.alpha", "must be below 1/2");
  if (!(c.beta > 4.0)) throw ValidationError("norms.beta", "must exceed 4");
  if (c.sigma < 0.0) throw ValidationError("norms.sigma", "must be positive");
  const double s = c.resolved_sigma();
  if (c.regime == Regime::theorem1) {
    if (!(s > 1.0)) throw ValidationError("norms.sigma", "theorem-1 requires sigma > 1");
    if (c.forcing != ForcingKind::none) throw ValidationError("scenario.forcing.kind", "theorem-1 requires phi = 0");
  } else if (!(s > 0.0)) {
    throw ValidationError("norms.sigma", "theorem-2 requires sigma > 0");
  }
  if (!(c.horizon >= 0.0) || !std::isfinite(c.horizon)) throw ValidationError("scenario.horizon", "must be >= 0");
  if (!(c.time_step > 0.0)) throw ValidationError("solver.time_step", "must be positive");
  if (!(c.substep > 0.0)) throw ValidationError("solver.substep", "must be positive");
  const int n = c.time_steps();
  if (std::abs(n * c.time_step - c.horizon) > 1e-9 * std::max(1.0, c.horizon))
    throw ValidationError("solver.time_step", "must divide the horizon");
  if (!(c.perturbation_scale >= 0.0) || c.perturbation_scale > c.perturbation_bound)
    throw ValidationError("scenario.perturbation_scale", "must lie in [0, scenario.perturbation_bound]");
  if (!(c.tolerance > 0.0)) throw ValidationError("solver.tolerance", "must be positive");
  if (c.max_iterations < 1) throw ValidationError("solver.max_iterations", "must be at least 1");
  if (c.forcing_epsilon < 0.0) throw ValidationError("scenario.forcing.epsilon", "must be nonnegative");
}

SemigroupStepper Scenario::stepper(Direction dir) const {
  SemigroupStepper st;
  st.dir = dir;
  st.dt_sub = cfg.substep;
  st.grid = &grid;
  st.K = &K;
  return st;
}

namespace {

double unit_from(std::mt19937_64& rng) {
  // Uniform in [-1, 1) from the top 53 bits; independent of library distributions.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return 2.0 * u - 1.0;
}

double kernel_orthogonality(const Field& f, const Scenario& sc) {
  double m = 0.0;
  for (const Field& q : sc.basis.f) m = std::max(m, std::abs(inner(f, q, sc.grid)));
  return m;
}

Field normalized(Field h, const VelocityGrid& vg, double beta) {
  const double n = weighted_sup_norm(h, vg, beta);
  if (n > 0.0)
    for (double& x : h.data) x /= n;
  return h;
}

}  // namespace

Field preset_perturbation(const PhaseGrid& g, const EquilibriumSet& eq, std::uint64_t seed, double modulation) {
  const VelocityGrid& vg = g.velocity;
  const int d = vg.dim;
  std::mt19937_64 rng(seed);
  std::vector<IVec> mono;
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b)
      for (int c = 0; a + b + c <= 3; ++c) {
        if (d == 2 && c > 0) continue;
        mono.push_back(IVec{a, b, c});
      }
  std::vector<double> coef;
  for (std::size_t i = 0; i < mono.size(); ++i) coef.push_back(unit_from(rng));
  const double scale = std::sqrt(0.5 - eq.alpha);
  Field h = Field::zeros(g);
  for (std::size_t iv = 0; iv < vg.size(); ++iv) {
    double p = 0.0;
    for (std::size_t m = 0; m < mono.size(); ++m) {
      double term = coef[m];
      for (int i = 0; i < d; ++i) term *= std::pow(vg.nodes[iv][i] * scale, mono[m][i]);
      p += term;
    }
    for (std::size_t ix = 0; ix < h.nx; ++ix) {
      const double x1 = g.space.position(ix)[0];
      h(iv, ix) = eq.G(iv, ix) * p * (1.0 + modulation * std::cos(2.0 * std::numbers::pi * x1));
    }
  }
  return h;
}

Scenario build_scenario(const ScenarioConfig& cfg) {
  validate(cfg);
  Scenario sc;
  sc.cfg = cfg;
  sc.grid.space = build_space_grid(cfg.dim, cfg.space_nodes);
  sc.grid.velocity = build_velocity_grid(cfg.dim, cfg.resolved_radius(), cfg.nodes_per_axis);
  sc.grid.sphere = build_sphere_quadrature(cfg.dim, cfg.sphere_order);
  sc.eq = make_equilibria(sc.grid, cfg.alpha);
  sc.basis = make_kernel_basis(sc.grid, sc.eq);
  sc.table = build_collision_table(sc.grid.velocity, sc.grid.sphere);
  sc.K = assemble_K(sc.eq, sc.table);
  sc.steps = cfg.time_steps();
  sc.dt = sc.steps == 0 ? 0.0 : cfg.horizon / sc.steps;

  const VelocityGrid& vg = sc.grid.velocity;
  const double sigma = cfg.resolved_sigma();
  const double c = cfg.perturbation_scale;

  // Initial data f0 B^-1 = G + c h.
  sc.psi0_p = Field::zeros(sc.grid);
  if (cfg.initial_kind != InitialKind::zero && c > 0.0) {
    Field h = preset_perturbation(sc.grid, sc.eq, cfg.initial_seed, cfg.initial_modulation);
    if (cfg.initial_kind == InitialKind::projected) h = project_off_kernel(h, sc.basis, sc.grid);
    h = normalized(std::move(h), vg, cfg.beta + 1.0);
    sc.psi0_p = c * h;
  }
  sc.f0 = hadamard(sc.eq.B, sc.eq.G + sc.psi0_p);

  // Terminal data e^{g(t)} B = G + eta_p(t).
  const double decay = cfg.regime == Regime::theorem2 ? std::exp(-sigma * cfg.horizon) : 1.0;
  const double ts = (cfg.terminal_scale < 0.0 ? c : cfg.terminal_scale) * decay;
  sc.g_hat = Field::zeros(sc.grid);
  sc.etaT_p = Field::zeros(sc.grid);
  const double logn = -0.5 * vg.dim * std::log(2.0 * std::numbers::pi);
  const double ap = sc.eq.alpha_prime;
  switch (cfg.terminal_kind) {
    case TerminalKind::zero:
      for (std::size_t iv = 0; iv < vg.size(); ++iv)
        for (std::size_t ix = 0; ix < sc.g_hat.nx; ++ix) sc.g_hat(iv, ix) = logn + cfg.alpha * vg.speed2[iv];
      break;
    case TerminalKind::degenerate:
      for (std::size_t iv = 0; iv < vg.size(); ++iv)
        for (std::size_t ix = 0; ix < sc.g_hat.nx; ++ix) sc.g_hat(iv, ix) = ap * vg.speed2[iv];
      break;
    case TerminalKind::orthogonal: {
      Field h = preset_perturbation(sc.grid, sc.eq, cfg.terminal_seed, cfg.terminal_modulation);
      h = normalized(project_off_kernel(h, sc.basis, sc.grid), vg, cfg.beta + 1.0);
      for (std::size_t iv = 0; iv < vg.size(); ++iv)
        for (std::size_t ix = 0; ix < sc.g_hat.nx; ++ix) {
          const double target = sc.eq.G(iv, ix) + ts * h(iv, ix);
          if (!(target > 0.0))
            throw ValidationError("scenario.terminal.scale", "terminal density must stay positive");
          sc.g_hat(iv, ix) = std::log(target) + ap * vg.speed2[iv];
        }
      break;
    }
    case TerminalKind::polynomial: {
      const double th = decay;
      for (std::size_t iv = 0; iv < vg.size(); ++iv) {
        const Vec& v = vg.nodes[iv];
        for (std::size_t ix = 0; ix < sc.g_hat.nx; ++ix) {
          const double x1 = sc.grid.space.position(ix)[0];
          double dev = cfg.terminal_a + cfg.terminal_c * vg.speed2[iv] +
                       cfg.terminal_modulation * std::cos(2.0 * std::numbers::pi * x1);
          for (int i = 0; i < vg.dim; ++i) dev += cfg.terminal_b[i] * v[i];
          sc.g_hat(iv, ix) = logn + cfg.alpha * vg.speed2[iv] + th * dev;
        }
      }
      break;
    }
  }
  if (cfg.terminal_kind != TerminalKind::zero) {
    for (std::size_t iv = 0; iv < vg.size(); ++iv)
      for (std::size_t ix = 0; ix < sc.g_hat.nx; ++ix)
        sc.etaT_p(iv, ix) = std::exp(sc.g_hat(iv, ix) - ap * vg.speed2[iv]) - sc.eq.G(iv, ix);
  }

  if (cfg.forcing == ForcingKind::preset) {
    for (int n = 0; n <= sc.steps; ++n) {
      Field phi = Field::zeros(sc.grid);
      const double s = sc.time(n);
      for (std::size_t iv = 0; iv < vg.size(); ++iv)
        for (std::size_t ix = 0; ix < phi.nx; ++ix)
          phi(iv, ix) = 0.5 * cfg.forcing_epsilon * std::exp(-s) * std::exp(-vg.speed2[iv] / 8.0);
      sc.forcing.push_back(std::move(phi));
    }
  }

  HypothesisChecks& hc = sc.checks;
  hc.initial_size = weighted_sup_norm(sc.psi0_p, vg, cfg.beta + 1.0);
  hc.initial_orthogonality = kernel_orthogonality(sc.psi0_p, sc);
  hc.terminal_size = weighted_sup_norm(sc.etaT_p, vg, cfg.beta + 1.0);
  hc.terminal_orthogonality = kernel_orthogonality(sc.etaT_p, sc);
  hc.terminal_bound = cfg.perturbation_bound * decay;
  hc.forcing_bound = sc.has_forcing() ? 0.5 * cfg.forcing_epsilon * (2.0 - std::exp(-cfg.horizon)) : 0.0;
  hc.mass_f0 = integral(sc.f0, sc.grid);
  if (cfg.terminal_kind != TerminalKind::degenerate && hc.terminal_size > hc.terminal_bound)
    throw ValidationError("scenario.terminal", "terminal perturbation exceeds the configured bound");
  return sc;
}

TrajectoryPair init_picard(const Scenario& sc) {
  TrajectoryPair p;
  p.horizon = sc.cfg.horizon;
  const int N = sc.steps;
  p.psi.resize(N + 1);
  p.eta.resize(N + 1);
  const SemigroupStepper fw = sc.stepper(Direction::forward), bw = sc.stepper(Direction::backward);
  p.psi[0] = sc.psi0_p;
  for (int n = 0; n < N; ++n) p.psi[n + 1] = semigroup_step(p.psi[n], sc.dt, fw);
  p.eta[N] = sc.etaT_p;
  if (sc.cfg.terminal_kind == TerminalKind::degenerate) {
    // eta = 1 is stationary for the backward equation; start there.
    for (int n = N; n > 0; --n) p.eta[n - 1] = sc.etaT_p;
    return p;
  }
  for (int n = N; n > 0; --n) p.eta[n - 1] = semigroup_step(p.eta[n], sc.dt, bw);
  return p;
}

Sources gamma_sources(const Field& psi_p, const Field& eta_p, const Field* phi, const Scenario& sc) {
  const Field psi = sc.eq.G + psi_p;
  const Field eta = sc.eq.G + eta_p;
  CollisionPair cc = coupled_collisions(psi, eta, sc.table);
  const Field kp = sc.K.apply(psi_p);
  const Field ke = sc.K.apply(eta_p);
  Sources s{std::move(cc.q_psi), std::move(cc.q_eta)};
  const std::vector<double>& nu = sc.K.nu;
  for (std::size_t iv = 0; iv < psi.nv; ++iv) {
    double* f = s.forward.row(iv);
    double* b = s.backward.row(iv);
    for (std::size_t ix = 0; ix < psi.nx; ++ix) {
      const std::size_t i = iv * psi.nx + ix;
      f[ix] -= kp.data[i] - nu[iv] * psi_p.data[i];
      b[ix] -= ke.data[i] - nu[iv] * eta_p.data[i];
      if (phi) {
        f[ix] -= psi.data[i] * phi->data[i];
        b[ix] -= eta.data[i] * phi->data[i];
      }
    }
  }
  return s;
}

TrajectoryPair apply_gamma(const TrajectoryPair& pair, const Scenario& sc) {
  const int N = sc.steps;
  if (static_cast<int>(pair.psi.size()) != N + 1 || static_cast<int>(pair.eta.size()) != N + 1)
    throw std::invalid_argument("apply_gamma: pair is not on the scenario time grid");
  std::vector<Sources> src;
  src.reserve(N + 1);
  for (int n = 0; n <= N; ++n)
    src.push_back(gamma_sources(pair.psi[n], pair.eta[n], sc.has_forcing() ? &sc.forcing[n] : nullptr, sc));
  TrajectoryPair out;
  out.horizon = pair.horizon;
  out.psi.resize(N + 1);
  out.eta.resize(N + 1);
  const SemigroupStepper fw = sc.stepper(Direction::forward), bw = sc.stepper(Direction::backward);
  out.psi[0] = sc.psi0_p;
  for (int n = 0; n < N; ++n) out.psi[n + 1] = propagate(out.psi[n], sc.dt, src[n].forward, src[n + 1].forward, fw);
  out.eta[N] = sc.etaT_p;
  for (int n = N; n > 0; --n)
    out.eta[n - 1] = propagate(out.eta[n], sc.dt, src[n].backward, src[n - 1].backward, bw);
  for (int n = 0; n <= N; ++n) {
    if (!all_finite(out.psi[n]) || !all_finite(out.eta[n])) {
      std::ostringstream os;
      os << "apply_gamma: non-finite values at time node " << n;
      throw std::runtime_error(os.str());
    }
  }
  return out;
}

TrajectoryPair difference(const TrajectoryPair& a, const TrajectoryPair& b) {
  TrajectoryPair d;
  d.horizon = a.horizon;
  for (std::size_t n = 0; n < a.psi.size(); ++n) {
    d.psi.push_back(a.psi[n] - b.psi[n]);
    d.eta.push_back(a.eta[n] - b.eta[n]);
  }
  return d;
}

RegimeNorm regime_norm(const TrajectoryPair& p, const Scenario& sc) {
  const VelocityGrid& vg = sc.grid.velocity;
  const double t = sc.cfg.horizon, beta = sc.cfg.beta, sigma = sc.cfg.resolved_sigma();
  RegimeNorm r;
  if (sc.cfg.regime == Regime::theorem1) {
    r.psi = trajectory_norm(p.psi, vg, t, beta, sigma, NormMode::polynomial, false).value;
    r.eta = trajectory_norm(p.eta, vg, t, beta, sigma, NormMode::polynomial, true).value;
  } else {
    r.psi = trajectory_norm(p.psi, vg, t, beta, 0.0, NormMode::exponential, false).value;
    r.eta = trajectory_norm(p.eta, vg, t, beta, sigma, NormMode::exponential, false).value;
  }
  return r;
}

CoupledSolution solve_coupled(const Scenario& sc) {
  CoupledSolution sol;
  sol.pair = init_picard(sc);
  double first = 0.0, prev = 0.0;
  for (int k = 1; k <= sc.cfg.max_iterations; ++k) {
    TrajectoryPair next;
    try {
      next = apply_gamma(sol.pair, sc);
    } catch (const std::runtime_error& e) {
      sol.status = std::string("diverged: ") + e.what();
      return sol;
    }
    const RegimeNorm d = regime_norm(difference(next, sol.pair), sc);
    IterationRecord rec;
    rec.iterate = k;
    rec.delta_psi = d.psi;
    rec.delta_eta = d.eta;
    rec.ratio = k == 1 || prev == 0.0 ? 0.0 : d.total() / prev;
    if (k > 2) sol.max_ratio_after_first = std::max(sol.max_ratio_after_first, rec.ratio);
    sol.history.push_back(rec);
    sol.pair = std::move(next);
    if (k == 1) first = d.total();
    prev = d.total();
    if (!std::isfinite(d.total())) {
      sol.status = "diverged: non-finite successive difference";
      return sol;
    }
    if (d.total() <= sc.cfg.tolerance) {
      sol.converged = true;
      sol.status = "converged";
      break;
    }
    if (k > 1 && d.total() > 1e3 * std::max(first, sc.cfg.tolerance)) {
      sol.status = "diverged: successive differences growing";
      return sol;
    }
  }
  if (!sol.converged) {
    sol.status = "diverged: maximum iterations reached";
    return sol;
  }
  const TrajectoryPair again = apply_gamma(sol.pair, sc);
  sol.fixed_point_residual = regime_norm(difference(again, sol.pair), sc).total();
  for (std::size_t n = 0; n < sol.pair.psi.size() && sol.positive; ++n) {
    for (std::size_t i = 0; i < sol.pair.psi[n].size(); ++i) {
      const double g = sc.eq.G.data[i];
      if (!(g + sol.pair.psi[n].data[i] > 0.0) || !(g + sol.pair.eta[n].data[i] > 0.0)) {
        sol.positive = false;
        std::ostringstream os;
        os << "non-positive density at time node " << n << ", entry " << i;
        sol.positivity_note = os.str();
        break;
      }
    }
  }
  return sol;
}

std::vector<Field> integrate_forward_boltzmann(const Scenario& sc) {
  const int N = sc.steps;
  const SemigroupStepper fw = sc.stepper(Direction::forward);
  const Field ones(sc.psi0_p.nv, sc.psi0_p.nx, 1.0);
  const Field zero_eta = ones - sc.eq.G;
  auto source = [&](const Field& psi_p) { return gamma_sources(psi_p, zero_eta, nullptr, sc).forward; };
  std::vector<Field> out{sc.psi0_p};
  Field f0 = source(sc.psi0_p);
  for (int n = 0; n < N; ++n) {
    Field y = propagate(out[n], sc.dt, f0, f0, fw);
    for (int it = 0; it < 200; ++it) {
      Field f1 = source(y);
      Field z = propagate(out[n], sc.dt, f0, f1, fw);
      const double change = max_abs(z - y);
      y = std::move(z);
      if (change <= 1e-16 * std::max(1.0, max_abs(y))) break;
    }
    f0 = source(y);
    out.push_back(std::move(y));
  }
  return out;
}

PhysicalTrajectory to_physical_variables(const TrajectoryPair& pair, const Scenario& sc) {
  PhysicalTrajectory out;
  const VelocityGrid& vg = sc.grid.velocity;
  const double ap = sc.eq.alpha_prime;
  for (std::size_t n = 0; n < pair.psi.size(); ++n) {
    Field phi = Field::zeros(sc.grid), p = Field::zeros(sc.grid);
    for (std::size_t iv = 0; iv < vg.size(); ++iv)
      for (std::size_t ix = 0; ix < phi.nx; ++ix) {
        const double eta = sc.eq.G(iv, ix) + pair.eta[n](iv, ix);
        const double psi = sc.eq.G(iv, ix) + pair.psi[n](iv, ix);
        if (!(eta > 0.0)) {
          std::ostringstream os;
          os << "to_physical_variables: eta <= 0 at time node " << n << ", velocity node " << iv << ", space node "
             << ix;
          throw std::domain_error(os.str());
        }
        p(iv, ix) = std::log(eta) + ap * vg.speed2[iv];
        phi(iv, ix) = psi * eta;
      }
    out.phi.push_back(std::move(phi));
    out.p.push_back(std::move(p));
  }
  return out;
}

void from_physical_variables(const PhysicalTrajectory& phys, const Scenario& sc, std::vector<Field>& psi,
                             std::vector<Field>& eta) {
  const VelocityGrid& vg = sc.grid.velocity;
  const double ap = sc.eq.alpha_prime;
  psi.clear();
  eta.clear();
  for (std::size_t n = 0; n < phys.p.size(); ++n) {
    Field a = Field::zeros(sc.grid), b = Field::zeros(sc.grid);
    for (std::size_t iv = 0; iv < vg.size(); ++iv)
      for (std::size_t ix = 0; ix < a.nx; ++ix) {
        const double e = std::exp(phys.p[n](iv, ix) - ap * vg.speed2[iv]);
        b(iv, ix) = e;
        a(iv, ix) = phys.phi[n](iv, ix) / e;
      }
    psi.push_back(std::move(a));
    eta.push_back(std::move(b));
  }
}

DecayReport decay_report(const TrajectoryPair& pair, const Scenario& sc) {
  const VelocityGrid& vg = sc.grid.velocity;
  const double t = sc.cfg.horizon, beta = sc.cfg.beta, sigma = sc.cfg.resolved_sigma();
  DecayReport r;
  if (sc.cfg.regime == Regime::theorem1) {
    r.psi = trajectory_norm(pair.psi, vg, t, beta, sigma, NormMode::polynomial, false);
    r.eta = trajectory_norm(pair.eta, vg, t, beta, sigma, NormMode::polynomial, true);
  } else {
    r.psi = trajectory_norm(pair.psi, vg, t, beta, 0.0, NormMode::exponential, false);
    r.eta = trajectory_norm(pair.eta, vg, t, beta, sigma, NormMode::exponential, false);
  }
  r.a_star = std::max(r.psi.value, r.eta.value);
  return r;
}

}  // namespace hjlab
