#include "hjlab/collision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hjlab/parallel.hpp"

namespace hjlab {

namespace {

struct Located {
  IVec base{0, 0, 0};
  std::array<double, 3> frac{0, 0, 0};
};

Located locate(const double* t_in, int d) {
  Located l;
  for (int i = 0; i < d; ++i) {
    double t = t_in[i];
    const double r = std::round(t);
    if (std::abs(t - r) <= kSnap) t = r;
    const double fl = std::floor(t);
    l.base[i] = static_cast<int>(fl);
    l.frac[i] = t - fl;
  }
  return l;
}

bool stencil_inside(const VelocityGrid& vg, const Located& l) {
  const int d = vg.dim;
  for (int c = 0; c < (1 << d); ++c) {
    IVec k = l.base;
    bool active = true;
    for (int i = 0; i < d; ++i) {
      if ((c >> i) & 1) {
        if (l.frac[i] == 0.0) active = false;
        k[i] += 1;
      }
    }
    if (active && !vg.in_ball(k)) return false;
  }
  return true;
}

// Row pointer table with a trailing zero row for sentinel stencil nodes.
struct Rows {
  std::vector<const double*> p;
  std::vector<double> zero;
  Rows(const Field& f) : p(f.nv + 1), zero(f.nx, 0.0) {
    for (std::size_t i = 0; i < f.nv; ++i) p[i] = f.row(i);
    p[f.nv] = zero.data();
  }
  const double* operator[](int i) const { return p[static_cast<std::size_t>(i)]; }
};

inline double gather(const Stencil& s, const Rows& r, std::size_t ix) {
  double acc = 0.0;
  for (int c = 0; c < s.count; ++c) acc += s.weight[c] * r[s.node[c]][ix];
  return acc;
}

}  // namespace

Stencil CollisionTable::stencil(std::ptrdiff_t base, const std::array<double, 3>& frac) const {
  Stencil s;
  s.count = 1 << dim;
  for (int c = 0; c < s.count; ++c) {
    double w = 1.0;
    for (int i = 0; i < dim; ++i) w *= ((c >> i) & 1) ? frac[i] : 1.0 - frac[i];
    s.weight[c] = w;
    s.node[c] = w == 0.0 ? static_cast<int>(nv) : index_map[static_cast<std::size_t>(base + corner_offset[c])];
  }
  return s;
}

CollisionTable build_collision_table(const VelocityGrid& vg, const SphereQuadrature& sq) {
  if (vg.dim != sq.dim) throw std::invalid_argument("build_collision_table: dimension mismatch");
  const int d = vg.dim;
  CollisionTable t;
  t.dim = d;
  t.nv = vg.size();
  t.index_map = vg.index_map;
  for (int c = 0; c < (1 << d); ++c) {
    std::ptrdiff_t off = 0;
    for (int i = 0; i < d; ++i)
      if ((c >> i) & 1) off += vg.stride[i];
    t.corner_offset[c] = off;
  }
  const std::size_t H = sq.hemisphere();
  const int nv = static_cast<int>(vg.size());
  for (int a = 0; a < nv; ++a) {
    const IVec& ka = vg.lattice[a];
    for (int b = a + 1; b < nv; ++b) {
      const IVec& kb = vg.lattice[b];
      double u[3] = {0, 0, 0};
      for (int i = 0; i < d; ++i) u[i] = static_cast<double>(ka[i] - kb[i]);
      for (std::size_t j = 0; j < H; ++j) {
        const Vec& w = sq.nodes[j];
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += u[i] * w[i];
        if (s == 0.0) continue;
        double tp[3] = {0, 0, 0}, tsp[3] = {0, 0, 0};
        for (int i = 0; i < d; ++i) {
          tp[i] = ka[i] - s * w[i];
          tsp[i] = kb[i] + s * w[i];
        }
        const Located lp = locate(tp, d), lsp = locate(tsp, d);
        if (!stencil_inside(vg, lp) || !stencil_inside(vg, lsp)) continue;
        CollisionEntry e;
        e.v = a;
        e.v_star = b;
        e.omega = static_cast<std::int32_t>(s < 0.0 ? j : j + H);
        e.weight = std::abs(s) * vg.dv * sq.weights[j] * vg.cell_volume;
        e.base_p = vg.padded_offset(lp.base);
        e.base_sp = vg.padded_offset(lsp.base);
        e.frac_p = lp.frac;
        e.frac_sp = lsp.frac;
        t.entries.push_back(e);
      }
    }
  }
  return t;
}

Field biased_collision(const Field& eta, const Field& psi1, const Field& psi2, const CollisionTable& table) {
  check_shape(eta, psi1, "biased_collision");
  check_shape(eta, psi2, "biased_collision");
  if (eta.nv != table.nv) throw std::invalid_argument("biased_collision: table built on another grid");
  Field out(eta.nv, eta.nx);
  const Rows r1(psi1), r2(psi2);
  parallel_for(eta.nx, [&](std::size_t xb, std::size_t xe) {
    for (const CollisionEntry& e : table.entries) {
      const Stencil sp = table.stencil_p(e), ssp = table.stencil_sp(e);
      const double hw = 0.5 * e.weight;
      const double* ev = eta.row(e.v);
      const double* es = eta.row(e.v_star);
      const double* a1 = psi1.row(e.v);
      const double* a2 = psi2.row(e.v);
      const double* b1 = psi1.row(e.v_star);
      const double* b2 = psi2.row(e.v_star);
      double* ov = out.row(e.v);
      double* os = out.row(e.v_star);
      for (std::size_t ix = xb; ix < xe; ++ix) {
        const double p1 = gather(sp, r1, ix), p2 = gather(sp, r2, ix);
        const double q1 = gather(ssp, r1, ix), q2 = gather(ssp, r2, ix);
        const double br = (p1 * q2 + p2 * q1) - (a1[ix] * b2[ix] + a2[ix] * b1[ix]);
        ov[ix] += hw * es[ix] * br;
        os[ix] += hw * ev[ix] * br;
      }
    }
  });
  return out;
}

CollisionPair coupled_collisions(const Field& psi, const Field& eta, const CollisionTable& table) {
  check_shape(psi, eta, "coupled_collisions");
  if (psi.nv != table.nv) throw std::invalid_argument("coupled_collisions: table built on another grid");
  CollisionPair out{Field(psi.nv, psi.nx), Field(psi.nv, psi.nx)};
  const Rows rp(psi), re(eta);
  parallel_for(psi.nx, [&](std::size_t xb, std::size_t xe) {
    for (const CollisionEntry& e : table.entries) {
      const Stencil sp = table.stencil_p(e), ssp = table.stencil_sp(e);
      const double w = e.weight;
      const double* pv = psi.row(e.v);
      const double* ps = psi.row(e.v_star);
      const double* ev = eta.row(e.v);
      const double* es = eta.row(e.v_star);
      double* qpv = out.q_psi.row(e.v);
      double* qps = out.q_psi.row(e.v_star);
      double* qev = out.q_eta.row(e.v);
      double* qes = out.q_eta.row(e.v_star);
      for (std::size_t ix = xb; ix < xe; ++ix) {
        const double dpsi = gather(sp, rp, ix) * gather(ssp, rp, ix) - pv[ix] * ps[ix];
        const double deta = gather(sp, re, ix) * gather(ssp, re, ix) - ev[ix] * es[ix];
        qpv[ix] += w * es[ix] * dpsi;
        qps[ix] += w * ev[ix] * dpsi;
        qev[ix] += w * ps[ix] * deta;
        qes[ix] += w * pv[ix] * deta;
      }
    }
  });
  return out;
}

Field collision_frequency(const EquilibriumSet& eq, const CollisionTable& table) {
  const Field& G = eq.G;
  if (G.nv != table.nv) throw std::invalid_argument("collision_frequency: table built on another grid");
  std::vector<double> nu(G.nv, 0.0);
  for (const CollisionEntry& e : table.entries) {
    const double gv = G(e.v, 0), gs = G(e.v_star, 0);
    nu[e.v] += e.weight * gs * gs;
    nu[e.v_star] += e.weight * gv * gv;
  }
  Field out(G.nv, G.nx);
  for (std::size_t iv = 0; iv < G.nv; ++iv)
    for (std::size_t ix = 0; ix < G.nx; ++ix) out(iv, ix) = nu[iv];
  return out;
}

Field linearized_K(const Field& f, const EquilibriumSet& eq, const CollisionTable& table) {
  Field q = biased_collision(eq.G, f, eq.G, table);
  Field nu = collision_frequency(eq, table);
  Field out(f.nv, f.nx);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = 2.0 * q.data[i] + nu.data[i] * f.data[i];
  return out;
}

KOperator assemble_K(const EquilibriumSet& eq, const CollisionTable& table) {
  const Field& G = eq.G;
  const std::size_t nv = table.nv;
  KOperator k;
  k.nv = nv;
  k.matrix.assign(nv * nv, 0.0);
  std::vector<double> g(nv);
  for (std::size_t i = 0; i < nv; ++i) g[i] = G(i, 0);
  const Field nu = collision_frequency(eq, table);
  k.nu.resize(nv);
  for (std::size_t i = 0; i < nv; ++i) k.nu[i] = nu(i, 0);
  auto interp = [&](const Stencil& s) {
    double acc = 0.0;
    for (int c = 0; c < s.count; ++c)
      if (s.node[c] < static_cast<int>(nv)) acc += s.weight[c] * g[s.node[c]];
    return acc;
  };
  for (const CollisionEntry& e : table.entries) {
    const Stencil sp = table.stencil_p(e), ssp = table.stencil_sp(e);
    const double gp = interp(sp), gsp = interp(ssp);
    // Bracket f'G*' + G'f*' - f G* - G f*, weighted by w G(v*) on row v and
    // by w G(v) on row v*.  The self loss terms cancel against nu.
    const std::size_t rows[2] = {static_cast<std::size_t>(e.v), static_cast<std::size_t>(e.v_star)};
    const double coef[2] = {e.weight * g[e.v_star], e.weight * g[e.v]};
    for (int side = 0; side < 2; ++side) {
      double* row = k.matrix.data() + rows[side] * nv;
      const double cf = coef[side];
      for (int c = 0; c < sp.count; ++c) {
        if (sp.node[c] < static_cast<int>(nv)) row[sp.node[c]] += cf * sp.weight[c] * gsp;
        if (ssp.node[c] < static_cast<int>(nv)) row[ssp.node[c]] += cf * ssp.weight[c] * gp;
      }
      if (side == 0)
        row[e.v_star] -= cf * g[e.v];
      else
        row[e.v] -= cf * g[e.v_star];
    }
  }
  return k;
}

void KOperator::apply(const Field& f, Field& out) const {
  if (f.nv != nv) throw std::invalid_argument("KOperator: grid mismatch");
  out = Field(f.nv, f.nx);
  parallel_for(nv, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const double* row = matrix.data() + i * nv;
      double* o = out.row(i);
      for (std::size_t j = 0; j < nv; ++j) {
        const double a = row[j];
        if (a == 0.0) continue;
        const double* fr = f.row(j);
        for (std::size_t ix = 0; ix < f.nx; ++ix) o[ix] += a * fr[ix];
      }
    }
  });
}

Field KOperator::apply(const Field& f) const {
  Field out;
  apply(f, out);
  return out;
}

Field nonlinearity(const Field& psi_p, const Field& eta_p, const EquilibriumSet& eq, const CollisionTable& table) {
  Field a = biased_collision(eta_p, psi_p, eq.G, table);
  Field b = biased_collision(eq.G, psi_p, psi_p, table);
  Field c = biased_collision(eta_p, psi_p, psi_p, table);
  Field out(psi_p.nv, psi_p.nx);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = 2.0 * a.data[i] + b.data[i] + c.data[i];
  return out;
}

FrequencyFit fit_frequency(const Field& nu, const VelocityGrid& vg) {
  FrequencyFit f;
  f.c1 = INFINITY;
  f.c2 = 0.0;
  f.nu_min = INFINITY;
  f.nu_max = 0.0;
  for (std::size_t iv = 0; iv < nu.nv; ++iv) {
    const double r = nu(iv, 0) / (1.0 + std::sqrt(vg.speed2[iv]));
    f.c1 = std::min(f.c1, r);
    f.c2 = std::max(f.c2, r);
    f.nu_min = std::min(f.nu_min, nu(iv, 0));
    f.nu_max = std::max(f.nu_max, nu(iv, 0));
  }
  return f;
}

}  // namespace hjlab
