#include "hjlab/transport.hpp"

#include <cmath>
#include <stdexcept>

#include "hjlab/parallel.hpp"

namespace hjlab {

Field free_transport(const Field& f, const PhaseGrid& g, double tau) {
  const SpaceGrid& sg = g.space;
  const VelocityGrid& vg = g.velocity;
  if (f.nv != vg.size() || f.nx != sg.size()) throw std::invalid_argument("free_transport: grid mismatch");
  if (tau == 0.0 || sg.nodes_per_axis == 1) return f;
  const int d = sg.dim;
  const int corners = 1 << d;
  Field out(f.nv, f.nx);
  parallel_for(f.nv, [&](std::size_t vb, std::size_t ve) {
    for (std::size_t iv = vb; iv < ve; ++iv) {
      // Per-axis weights taken from |c| so that v and -v see identical values.
      IVec shift{0, 0, 0};
      Vec wlo{1, 1, 1}, whi{0, 0, 0};
      for (int i = 0; i < d; ++i) {
        double c = -tau * vg.nodes[iv][i] / sg.dx;
        const double r = std::round(c);
        if (std::abs(c - r) <= 1e-12) c = r;
        const double a = std::abs(c);
        const double fa = std::floor(a);
        const double fr = a - fa;
        if (c >= 0.0) {
          shift[i] = static_cast<int>(fa);
          wlo[i] = 1.0 - fr;
          whi[i] = fr;
        } else if (fr == 0.0) {
          shift[i] = -static_cast<int>(fa);
        } else {
          shift[i] = -static_cast<int>(fa) - 1;
          wlo[i] = fr;
          whi[i] = 1.0 - fr;
        }
      }
      const double* src = f.row(iv);
      double* dst = out.row(iv);
      double vals[8];
      for (std::size_t ix = 0; ix < f.nx; ++ix) {
        const IVec j = sg.coords(ix);
        for (int c = 0; c < corners; ++c) {
          IVec k = j;
          for (int i = 0; i < d; ++i) k[i] += shift[i] + ((c >> i) & 1);
          vals[c] = src[sg.index(k)];
        }
        // Collapse one axis at a time; each step is a two-term sum.
        for (int i = 0, n = corners; i < d; ++i, n >>= 1)
          for (int c = 0; c < n / 2; ++c) vals[c] = wlo[i] * vals[2 * c] + whi[i] * vals[2 * c + 1];
        dst[ix] = vals[0];
      }
    }
  });
  return out;
}

Field d1_apply(const Field& f, double s, Direction dir, const std::vector<double>& nu, const PhaseGrid& g) {
  if (s < 0.0) throw std::invalid_argument("d1_apply: negative time");
  if (s == 0.0) return f;
  Field damped = f;
  for (std::size_t iv = 0; iv < f.nv; ++iv) {
    const double e = std::exp(-nu[iv] * s);
    double* r = damped.row(iv);
    for (std::size_t ix = 0; ix < f.nx; ++ix) r[ix] *= e;
  }
  return free_transport(damped, g, dir == Direction::forward ? s : -s);
}

std::vector<double> substeps(double s, double dt_sub) {
  if (!(dt_sub > 0.0)) throw std::invalid_argument("substep size must be positive");
  if (s < 0.0) throw std::invalid_argument("negative propagation time");
  std::vector<double> h;
  const double q = s / dt_sub;
  const long full = static_cast<long>(std::floor(q + 1e-9));
  h.assign(static_cast<std::size_t>(full), dt_sub);
  const double rem = s - static_cast<double>(full) * dt_sub;
  if (rem > 1e-12 * std::max(1.0, s)) h.push_back(rem);
  return h;
}

void exponential_substep(Field& y, double h, const Field* source, const SemigroupStepper& st) {
  const std::vector<double>& nu = st.K->nu;
  Field ky;
  if (st.zero_K)
    ky = Field(y.nv, y.nx);
  else
    st.K->apply(y, ky);
  for (std::size_t iv = 0; iv < y.nv; ++iv) {
    const double e = std::exp(-nu[iv] * h);
    const double phi = -std::expm1(-nu[iv] * h) / nu[iv];
    double* r = y.row(iv);
    const double* k = ky.row(iv);
    if (source) {
      const double* sr = source->row(iv);
      for (std::size_t ix = 0; ix < y.nx; ++ix) r[ix] = e * r[ix] + phi * (k[ix] + sr[ix]);
    } else {
      for (std::size_t ix = 0; ix < y.nx; ++ix) r[ix] = e * r[ix] + phi * k[ix];
    }
  }
  y = free_transport(y, *st.grid, st.dir == Direction::forward ? h : -h);
}

Field semigroup_step(const Field& f, double delta, const SemigroupStepper& st) {
  if (!(delta > 0.0)) throw std::invalid_argument("semigroup_step: delta must be positive");
  Field y = f;
  for (double h : substeps(delta, st.dt_sub)) exponential_substep(y, h, nullptr, st);
  return y;
}

Field semigroup_apply(const Field& f, double s, const SemigroupStepper& st) {
  Field y = f;
  for (double h : substeps(s, st.dt_sub)) exponential_substep(y, h, nullptr, st);
  return y;
}

Field d2_residual(const Field& f, double s, const SemigroupStepper& st) {
  return semigroup_apply(f, s, st) - d1_apply(f, s, st.dir, st.K->nu, *st.grid);
}

Field propagate(const Field& y0, double delta, const Field& F0, const Field& F1, const SemigroupStepper& st) {
  Field y = y0;
  Field src(y0.nv, y0.nx);
  double tau = 0.0;
  for (double h : substeps(delta, st.dt_sub)) {
    const double th = (tau + 0.5 * h) / delta;
    for (std::size_t i = 0; i < src.size(); ++i) src.data[i] = (1.0 - th) * F0.data[i] + th * F1.data[i];
    exponential_substep(y, h, &src, st);
    tau += h;
  }
  return y;
}

}  // namespace hjlab
