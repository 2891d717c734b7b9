#include "hjlab/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjlab::oracle {

namespace {

void require_tiny(const VelocityGrid& vg) {
  if (vg.size() > kNodeCap) throw std::length_error("oracle: instance too large");
}

int lookup(const VelocityGrid& vg, const IVec& k) {
  for (std::size_t i = 0; i < vg.lattice.size(); ++i) {
    bool same = true;
    for (int a = 0; a < vg.dim; ++a) same = same && vg.lattice[i][a] == k[a];
    if (same) return static_cast<int>(i);
  }
  return -1;
}

// Post-collision point in lattice units: snapped lower corner and fractions.
struct Point {
  IVec base{0, 0, 0};
  double frac[3] = {0, 0, 0};
  bool inside = true;
};

Point place(const VelocityGrid& vg, const double* t) {
  Point p;
  for (int a = 0; a < vg.dim; ++a) {
    double x = t[a];
    if (std::abs(x - std::round(x)) <= kSnap) x = std::round(x);
    p.base[a] = static_cast<int>(std::floor(x));
    p.frac[a] = x - std::floor(x);
  }
  for (int c = 0; c < (1 << vg.dim); ++c) {
    IVec k = p.base;
    double w = 1.0;
    for (int a = 0; a < vg.dim; ++a) {
      if ((c >> a) & 1) {
        k[a] += 1;
        w *= p.frac[a];
      } else {
        w *= 1.0 - p.frac[a];
      }
    }
    if (w != 0.0 && lookup(vg, k) < 0) p.inside = false;
  }
  return p;
}

double value_at(const Field& f, const VelocityGrid& vg, std::size_t ix, const Point& p) {
  double acc = 0.0;
  for (int c = 0; c < (1 << vg.dim); ++c) {
    IVec k = p.base;
    double w = 1.0;
    for (int a = 0; a < vg.dim; ++a) {
      if ((c >> a) & 1) {
        k[a] += 1;
        w *= p.frac[a];
      } else {
        w *= 1.0 - p.frac[a];
      }
    }
    if (w == 0.0) continue;
    acc += w * f(static_cast<std::size_t>(lookup(vg, k)), ix);
  }
  return acc;
}

// Visits every retained ordered triple (v, v*, omega).
template <class Fn>
void each_triple(const VelocityGrid& vg, const SphereQuadrature& sq, Fn&& fn) {
  const int d = vg.dim;
  for (std::size_t i = 0; i < vg.size(); ++i) {
    for (std::size_t j = 0; j < vg.size(); ++j) {
      for (std::size_t k = 0; k < sq.size(); ++k) {
        const Vec& w = sq.nodes[k];
        double dot = 0.0, s = 0.0;
        for (int a = 0; a < d; ++a) dot += static_cast<double>(vg.lattice[j][a] - vg.lattice[i][a]) * w[a];
        if (!(dot > 0.0)) continue;
        for (int a = 0; a < d; ++a) s += static_cast<double>(vg.lattice[i][a] - vg.lattice[j][a]) * w[a];
        double tp[3] = {0, 0, 0}, tsp[3] = {0, 0, 0};
        for (int a = 0; a < d; ++a) {
          tp[a] = vg.lattice[i][a] - s * w[a];
          tsp[a] = vg.lattice[j][a] + s * w[a];
        }
        const Point p = place(vg, tp), q = place(vg, tsp);
        if (!p.inside || !q.inside) continue;
        const double weight = dot * vg.dv * sq.weights[k] * vg.cell_volume;
        fn(i, j, weight, p, q);
      }
    }
  }
}

Field transport(const Field& f, const PhaseGrid& g, double tau) {
  const SpaceGrid& sg = g.space;
  if (tau == 0.0 || sg.nodes_per_axis == 1) return f;
  const int d = sg.dim, m = sg.nodes_per_axis;
  Field out(f.nv, f.nx);
  for (std::size_t iv = 0; iv < f.nv; ++iv) {
    for (std::size_t ix = 0; ix < f.nx; ++ix) {
      const IVec j = sg.coords(ix);
      int lo[3] = {0, 0, 0};
      double fr[3] = {0, 0, 0};
      for (int a = 0; a < d; ++a) {
        double c = -tau * g.velocity.nodes[iv][a] / sg.dx;
        if (std::abs(c - std::round(c)) <= 1e-12) c = std::round(c);
        lo[a] = static_cast<int>(std::floor(c));
        fr[a] = c - std::floor(c);
      }
      double acc = 0.0;
      for (int c = 0; c < (1 << d); ++c) {
        double w = 1.0;
        std::size_t idx = 0;
        for (int a = 0; a < d; ++a) {
          const int up = (c >> a) & 1;
          w *= up ? fr[a] : 1.0 - fr[a];
          const int q = (((j[a] + lo[a] + up) % m) + m) % m;
          idx = idx * m + q;
        }
        if (w != 0.0) acc += w * f(iv, idx);
      }
      out(iv, ix) = acc;
    }
  }
  return out;
}

Field plus(const Field& a, const Field& b) {
  Field r = a;
  for (std::size_t i = 0; i < r.data.size(); ++i) r.data[i] += b.data[i];
  return r;
}

struct Naive {
  const Scenario& sc;
  std::vector<double> nu;
  explicit Naive(const Scenario& s) : sc(s), nu(frequency(s.eq.G, s.grid)) {}

  // K y = 2 Q_G(y, G) + nu y.
  Field K(const Field& y) const {
    Field q = collision(sc.eq.G, y, sc.eq.G, sc.grid);
    for (std::size_t iv = 0; iv < y.nv; ++iv)
      for (std::size_t ix = 0; ix < y.nx; ++ix) q(iv, ix) = 2.0 * q(iv, ix) + nu[iv] * y(iv, ix);
    return q;
  }

  Field source(const Field& own_p, const Field& other_p, const Field* phi) const {
    const Field own = plus(sc.eq.G, own_p), other = plus(sc.eq.G, other_p);
    Field q = collision(other, own, own, sc.grid);
    Field lin = collision(sc.eq.G, own_p, sc.eq.G, sc.grid);
    for (std::size_t i = 0; i < q.data.size(); ++i) {
      q.data[i] -= 2.0 * lin.data[i];
      if (phi) q.data[i] -= own.data[i] * phi->data[i];
    }
    return q;
  }

  Field interval(const Field& y0, double delta, const Field& F0, const Field& F1, double sign) const {
    std::vector<double> hs;
    const long full = static_cast<long>(std::floor(delta / sc.cfg.substep + 1e-9));
    for (long i = 0; i < full; ++i) hs.push_back(sc.cfg.substep);
    const double rem = delta - static_cast<double>(full) * sc.cfg.substep;
    if (rem > 1e-12 * std::max(1.0, delta)) hs.push_back(rem);
    Field y = y0;
    double tau = 0.0;
    for (double h : hs) {
      const double th = (tau + 0.5 * h) / delta;
      Field ky = K(y);
      for (std::size_t iv = 0; iv < y.nv; ++iv) {
        const double e = std::exp(-nu[iv] * h);
        const double ph = -std::expm1(-nu[iv] * h) / nu[iv];
        for (std::size_t ix = 0; ix < y.nx; ++ix) {
          const double f = (1.0 - th) * F0(iv, ix) + th * F1(iv, ix);
          y(iv, ix) = e * y(iv, ix) + ph * (ky(iv, ix) + f);
        }
      }
      y = transport(y, sc.grid, sign * h);
      tau += h;
    }
    return y;
  }
};

double trap(const std::vector<double>& v, double dt) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) s += 0.5 * dt * (v[i] + v[i + 1]);
  return s;
}

}  // namespace

OracleReport compare(std::string name, double main, double oracle) {
  OracleReport r;
  r.name = std::move(name);
  r.main = main;
  r.oracle = oracle;
  r.abs_diff = std::abs(main - oracle);
  r.rel_diff = r.abs_diff / std::max({std::abs(main), std::abs(oracle), kEps});
  return r;
}

Field collision(const Field& eta, const Field& psi1, const Field& psi2, const PhaseGrid& g) {
  const VelocityGrid& vg = g.velocity;
  require_tiny(vg);
  Field out(eta.nv, eta.nx);
  for (std::size_t ix = 0; ix < eta.nx; ++ix) {
    each_triple(vg, g.sphere, [&](std::size_t i, std::size_t j, double w, const Point& p, const Point& q) {
      const double a1 = value_at(psi1, vg, ix, p), a2 = value_at(psi2, vg, ix, p);
      const double b1 = value_at(psi1, vg, ix, q), b2 = value_at(psi2, vg, ix, q);
      const double gain = a1 * b2 + a2 * b1;
      const double loss = psi1(i, ix) * psi2(j, ix) + psi2(i, ix) * psi1(j, ix);
      out(i, ix) += 0.5 * w * eta(j, ix) * (gain - loss);
    });
  }
  return out;
}

std::size_t triple_count(const VelocityGrid& vg, const SphereQuadrature& sq) {
  require_tiny(vg);
  std::size_t n = 0;
  each_triple(vg, sq, [&](std::size_t, std::size_t, double, const Point&, const Point&) { ++n; });
  return n;
}

std::vector<double> frequency(const Field& G, const PhaseGrid& g) {
  const VelocityGrid& vg = g.velocity;
  require_tiny(vg);
  std::vector<double> nu(vg.size(), 0.0);
  each_triple(vg, g.sphere, [&](std::size_t i, std::size_t j, double w, const Point&, const Point&) {
    nu[i] += w * G(j, 0) * G(j, 0);
  });
  return nu;
}

double hamiltonian(const Field& phi, const Field& p, const PhaseGrid& g) {
  const VelocityGrid& vg = g.velocity;
  require_tiny(vg);
  double total = 0.0;
  for (std::size_t ix = 0; ix < phi.nx; ++ix) {
    each_triple(vg, g.sphere, [&](std::size_t i, std::size_t j, double w, const Point& a, const Point& b) {
      const double dp = value_at(p, vg, ix, a) + value_at(p, vg, ix, b) - p(i, ix) - p(j, ix);
      total += 0.5 * w * phi(i, ix) * phi(j, ix) * (std::exp(dp) - 1.0);
    });
  }
  return total * g.space.cell_volume * vg.cell_volume;
}

double hamiltonian_sym(const Field& psi, const Field& eta, const PhaseGrid& g) {
  const VelocityGrid& vg = g.velocity;
  require_tiny(vg);
  double total = 0.0;
  for (std::size_t ix = 0; ix < psi.nx; ++ix) {
    each_triple(vg, g.sphere, [&](std::size_t i, std::size_t j, double w, const Point& a, const Point& b) {
      const double x = value_at(psi, vg, ix, a) * value_at(psi, vg, ix, b) - psi(i, ix) * psi(j, ix);
      const double y = value_at(eta, vg, ix, a) * value_at(eta, vg, ix, b) - eta(i, ix) * eta(j, ix);
      total += -0.25 * w * x * y;
    });
  }
  return total * g.space.cell_volume * vg.cell_volume;
}

double inner(const Field& a, const Field& b, const PhaseGrid& g) {
  double s = 0.0;
  for (std::size_t iv = 0; iv < a.nv; ++iv)
    for (std::size_t ix = 0; ix < a.nx; ++ix) s += a(iv, ix) * b(iv, ix) * g.space.cell_volume * g.velocity.cell_volume;
  return s;
}

TrajectoryPair apply_gamma(const TrajectoryPair& pair, const Scenario& sc) {
  require_tiny(sc.grid.velocity);
  const Naive nv(sc);
  const int N = sc.steps;
  std::vector<Field> fwd, bwd;
  for (int n = 0; n <= N; ++n) {
    const Field* phi = sc.has_forcing() ? &sc.forcing[n] : nullptr;
    fwd.push_back(nv.source(pair.psi[n], pair.eta[n], phi));
    bwd.push_back(nv.source(pair.eta[n], pair.psi[n], phi));
  }
  TrajectoryPair out;
  out.horizon = pair.horizon;
  out.psi.assign(N + 1, Field());
  out.eta.assign(N + 1, Field());
  out.psi[0] = sc.psi0_p;
  for (int n = 0; n < N; ++n) out.psi[n + 1] = nv.interval(out.psi[n], sc.dt, fwd[n], fwd[n + 1], 1.0);
  out.eta[N] = sc.etaT_p;
  for (int n = N; n > 0; --n) out.eta[n - 1] = nv.interval(out.eta[n], sc.dt, bwd[n], bwd[n - 1], -1.0);
  return out;
}

std::pair<double, double> functional(const TrajectoryPair& pair, const Scenario& sc) {
  const PhaseGrid& g = sc.grid;
  require_tiny(g.velocity);
  const Field& G = sc.eq.G;
  const std::size_t N = pair.psi.size() - 1;
  std::vector<double> def_int, dec_int;
  for (std::size_t n = 0; n <= N; ++n) {
    const Field psi = plus(G, pair.psi[n]), eta = plus(G, pair.eta[n]);
    const Field q_eta = collision(psi, eta, eta, g);
    const Field q_psi = collision(eta, psi, psi, g);
    double a = 0.0;
    for (std::size_t i = 0; i < psi.data.size(); ++i) {
      double ds = -q_eta.data[i];
      if (sc.has_forcing()) {
        const double phi = sc.forcing[n].data[i];
        ds += eta.data[i] * phi;
        a -= phi * psi.data[i] * eta.data[i] * g.volume();
      }
      a += ds * psi.data[i] * g.volume();
    }
    def_int.push_back(a + hamiltonian_sym(psi, eta, g));
    dec_int.push_back(oracle::inner(eta, q_psi, g));
  }
  const double first = -1.0 + oracle::inner(plus(G, sc.psi0_p), plus(G, pair.eta[0]), g) + trap(def_int, sc.dt);
  const double second = -1.0 + oracle::inner(plus(G, pair.eta[N]), plus(G, pair.psi[N]), g) - 0.5 * trap(dec_int, sc.dt);
  return {first, second};
}

double convolution_integral(double s1, double s2, double t, int n_points) {
  if (!(s1 > 1.0) || !(s2 > 1.0)) throw std::invalid_argument("convolution_bound_check: sigma must exceed 1");
  if (t < 0.0) throw std::invalid_argument("convolution_bound_check: t must be nonnegative");
  if (t == 0.0) return 0.0;
  int n = std::max(2, n_points);
  if (n % 2) ++n;
  const double h = t / n;
  auto f = [&](double s) { return std::pow(1.0 + (t - s), -s2) * std::pow(1.0 + s, -s1); };
  double acc = f(0.0) + f(t);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return acc * h / 3.0;
}

ConvolutionReport convolution_bound_check(double s1, double s2, const std::vector<double>& times, int n_points) {
  if (!(s1 > 1.0) || !(s2 > 1.0)) throw std::invalid_argument("convolution_bound_check: sigma must exceed 1");
  ConvolutionReport r;
  r.sigma1 = s1;
  r.sigma2 = s2;
  double lo = INFINITY;
  for (double t : times) {
    const double I = convolution_integral(s1, s2, t, n_points);
    const double c = I * std::pow(1.0 + t, std::min(s1, s2));
    r.times.push_back(t);
    r.integrals.push_back(I);
    r.constants.push_back(c);
    r.witnessed = std::max(r.witnessed, c);
    if (t > 0.0) lo = std::min(lo, c);
  }
  r.spread = lo > 0.0 && std::isfinite(lo) ? r.witnessed / lo : INFINITY;
  return r;
}

}  // namespace hjlab::oracle
