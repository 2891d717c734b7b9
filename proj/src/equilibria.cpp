#include "hjlab/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hjlab {

EquilibriumSet make_equilibria(const PhaseGrid& g, double alpha) {
  if (!(alpha < 0.5) || !std::isfinite(alpha))
    throw ValidationError("equilibrium.alpha", "alpha must be finite and below 1/2");
  const VelocityGrid& vg = g.velocity;
  const std::size_t nx = g.space.size();
  EquilibriumSet eq;
  eq.alpha = alpha;
  eq.alpha_prime = 0.5 * (0.5 + alpha);
  eq.M = eq.E = eq.B = eq.G = Field::zeros(g);
  const double norm = std::pow(2.0 * std::numbers::pi, -0.5 * vg.dim);
  for (std::size_t iv = 0; iv < vg.size(); ++iv) {
    const double s2 = vg.speed2[iv];
    const double m = norm * std::exp(-0.5 * s2);
    const double e = norm * std::exp(alpha * s2);
    const double b = std::exp(-eq.alpha_prime * s2);
    const double gg = norm * std::exp(-0.5 * (0.5 - alpha) * s2);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      eq.M(iv, ix) = m;
      eq.E(iv, ix) = e;
      eq.B(iv, ix) = b;
      eq.G(iv, ix) = gg;
    }
  }
  return eq;
}

double inner(const Field& a, const Field& b, const PhaseGrid& g) {
  check_shape(a, b, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data[i] * b.data[i];
  return s * g.volume();
}

double integral(const Field& f, const PhaseGrid& g) {
  double s = 0.0;
  for (double x : f.data) s += x;
  return s * g.volume();
}

std::vector<Field> kernel_generators(const PhaseGrid& g, const EquilibriumSet& eq) {
  const VelocityGrid& vg = g.velocity;
  std::vector<Field> gens;
  gens.push_back(eq.G);
  for (int i = 0; i < vg.dim; ++i) {
    Field f = eq.G;
    for (std::size_t iv = 0; iv < vg.size(); ++iv)
      for (std::size_t ix = 0; ix < f.nx; ++ix) f(iv, ix) *= vg.nodes[iv][i];
    gens.push_back(std::move(f));
  }
  Field f = eq.G;
  for (std::size_t iv = 0; iv < vg.size(); ++iv)
    for (std::size_t ix = 0; ix < f.nx; ++ix) f(iv, ix) *= vg.speed2[iv];
  gens.push_back(std::move(f));
  return gens;
}

KernelBasis make_kernel_basis(const PhaseGrid& g, const EquilibriumSet& eq) {
  KernelBasis kb;
  for (Field f : kernel_generators(g, eq)) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const Field& q : kb.f) {
        const double c = inner(f, q, g);
        for (std::size_t i = 0; i < f.size(); ++i) f.data[i] -= c * q.data[i];
      }
    }
    const double n = std::sqrt(inner(f, f, g));
    if (!(n > 0.0)) throw std::runtime_error("kernel generators are linearly dependent on this grid");
    for (double& x : f.data) x /= n;
    kb.f.push_back(std::move(f));
  }
  return kb;
}

Field project_off_kernel(const Field& f, const KernelBasis& basis, const PhaseGrid& g) {
  Field r = f;
  for (const Field& q : basis.f) {
    check_shape(f, q, "project_off_kernel");
    const double c = inner(f, q, g);
    for (std::size_t i = 0; i < r.size(); ++i) r.data[i] -= c * q.data[i];
  }
  return r;
}

double weighted_sup_norm(const Field& f, const VelocityGrid& vg, double beta) {
  if (beta < 0.0) throw std::invalid_argument("weighted_sup_norm: beta must be nonnegative");
  if (f.nv != vg.size()) throw std::invalid_argument("weighted_sup_norm: grid mismatch");
  double m = 0.0;
  for (std::size_t iv = 0; iv < f.nv; ++iv) {
    const double w = std::pow(1.0 + std::sqrt(vg.speed2[iv]), beta);
    const double* r = f.row(iv);
    for (std::size_t ix = 0; ix < f.nx; ++ix) m = std::max(m, std::abs(r[ix]) * w);
  }
  return m;
}

Trajectory reverse_time(const Trajectory& traj) { return Trajectory(traj.rbegin(), traj.rend()); }

NormReport trajectory_norm(const Trajectory& traj, const VelocityGrid& vg, double t, double beta, double sigma,
                           NormMode mode, bool reversed) {
  if (traj.empty()) throw std::invalid_argument("trajectory_norm: empty trajectory");
  NormReport r;
  r.beta = beta;
  r.sigma = sigma;
  r.mode = mode;
  r.reversed = reversed;
  const std::size_t N = traj.size() - 1;
  for (std::size_t n = 0; n <= N; ++n) {
    // Reversal maps the entry at s_n to time t - s_n.
    const double s = N == 0 ? 0.0 : t * static_cast<double>(reversed ? N - n : n) / static_cast<double>(N);
    const double w = mode == NormMode::polynomial ? std::pow(1.0 + s, sigma) : std::exp(sigma * s);
    const double nrm = weighted_sup_norm(traj[n], vg, beta);
    r.per_node.push_back(nrm);
    r.weighted.push_back(w * nrm);
    r.value = std::max(r.value, w * nrm);
  }
  return r;
}

}  // namespace hjlab
