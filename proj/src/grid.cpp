#include "hjlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hjlab {

namespace {

double clean(double c) { return std::abs(c) < 1e-14 ? 0.0 : c; }

bool upper_hemisphere(const Vec& w) {
  const double tol = 1e-14;
  if (w[2] > tol) return true;
  if (w[2] < -tol) return false;
  if (w[1] > tol) return true;
  if (w[1] < -tol) return false;
  return w[0] > 0.0;
}

// Gauss-Legendre nodes on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

void add_orbit(std::vector<Vec>& out, std::vector<double>& wt, double a, double b, double c, double weight) {
  // All sign and permutation variants of (a,b,c), deduplicated.
  std::vector<Vec> pts;
  std::array<double, 3> base{a, b, c};
  std::sort(base.begin(), base.end());
  do {
    for (int s = 0; s < 8; ++s) {
      Vec p{(s & 1) ? -base[0] : base[0], (s & 2) ? -base[1] : base[1], (s & 4) ? -base[2] : base[2]};
      bool dup = false;
      for (const auto& q : pts) {
        if (q == p) {
          dup = true;
          break;
        }
      }
      if (!dup) pts.push_back(p);
    }
  } while (std::next_permutation(base.begin(), base.end()));
  for (const auto& p : pts) {
    out.push_back(p);
    wt.push_back(weight);
  }
}

SphereQuadrature symmetrize(int d, int order, std::string name, const std::vector<Vec>& pts,
                            const std::vector<double>& wts) {
  SphereQuadrature q;
  q.dim = d;
  q.order = order;
  q.name = std::move(name);
  std::vector<Vec> hemi;
  std::vector<double> hw;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Vec p{clean(pts[i][0]), clean(pts[i][1]), clean(pts[i][2])};
    if (upper_hemisphere(p)) {
      hemi.push_back(p);
      hw.push_back(wts[i]);
    }
  }
  if (hemi.size() * 2 != pts.size()) throw std::logic_error("sphere rule is not antipodally symmetric");
  q.nodes = hemi;
  q.weights = hw;
  for (std::size_t i = 0; i < hemi.size(); ++i) {
    q.nodes.push_back(Vec{-hemi[i][0], -hemi[i][1], -hemi[i][2]});
    q.weights.push_back(hw[i]);
  }
  return q;
}

}  // namespace

bool VelocityGrid::in_ball(const IVec& k) const {
  long s = 0;
  for (int i = 0; i < dim; ++i) s += static_cast<long>(k[i]) * k[i];
  return s <= static_cast<long>(half) * half;
}

std::ptrdiff_t VelocityGrid::padded_offset(const IVec& k) const {
  std::ptrdiff_t off = 0;
  for (int i = 0; i < dim; ++i) off += static_cast<std::ptrdiff_t>(k[i] + half + 1) * stride[i];
  return off;
}

int VelocityGrid::find(const IVec& k) const {
  for (int i = 0; i < dim; ++i) {
    if (k[i] < -half || k[i] > half) return -1;
  }
  int id = index_map[padded_offset(k)];
  return id == static_cast<int>(size()) ? -1 : id;
}

VelocityGrid build_velocity_grid(int d, double R, int n) {
  if (d != 2 && d != 3) throw ValidationError("grid.dimension", "dimension must be 2 or 3");
  if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("grid.velocity.radius", "radius must be positive");
  if (n < 3 || n % 2 == 0)
    throw ValidationError("grid.velocity.nodes_per_axis", "nodes per axis must be odd and at least 3");
  VelocityGrid g;
  g.dim = d;
  g.radius = R;
  g.nodes_per_axis = n;
  g.half = (n - 1) / 2;
  g.dv = 2.0 * R / (n - 1);
  g.cell_volume = std::pow(g.dv, d);
  g.padded_axis = n + 2;
  g.stride = {0, 0, 0};
  std::ptrdiff_t s = 1;
  for (int i = d - 1; i >= 0; --i) {
    g.stride[i] = s;
    s *= g.padded_axis;
  }
  const int h = g.half;
  IVec k{0, 0, 0};
  const int k2lo = d == 3 ? -h : 0, k2hi = d == 3 ? h : 0;
  for (k[0] = -h; k[0] <= h; ++k[0]) {
    for (k[1] = -h; k[1] <= h; ++k[1]) {
      for (k[2] = k2lo; k[2] <= k2hi; ++k[2]) {
        if (!g.in_ball(k)) continue;
        g.lattice.push_back(k);
        Vec v{k[0] * g.dv, k[1] * g.dv, k[2] * g.dv};
        g.nodes.push_back(v);
        g.speed2.push_back(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      }
    }
  }
  g.index_map.assign(static_cast<std::size_t>(s), static_cast<int>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) g.index_map[g.padded_offset(g.lattice[i])] = static_cast<int>(i);
  return g;
}

std::size_t SpaceGrid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < dim; ++i) s *= nodes_per_axis;
  return s;
}

IVec SpaceGrid::coords(std::size_t ix) const {
  IVec j{0, 0, 0};
  for (int i = dim - 1; i >= 0; --i) {
    j[i] = static_cast<int>(ix % nodes_per_axis);
    ix /= nodes_per_axis;
  }
  return j;
}

std::size_t SpaceGrid::index(const IVec& j) const {
  std::size_t ix = 0;
  for (int i = 0; i < dim; ++i) {
    int w = ((j[i] % nodes_per_axis) + nodes_per_axis) % nodes_per_axis;
    ix = ix * nodes_per_axis + w;
  }
  return ix;
}

Vec SpaceGrid::position(std::size_t ix) const {
  IVec j = coords(ix);
  return Vec{j[0] * dx, j[1] * dx, j[2] * dx};
}

SpaceGrid build_space_grid(int d, int m) {
  if (d != 2 && d != 3) throw ValidationError("grid.dimension", "dimension must be 2 or 3");
  if (m < 1) throw ValidationError("grid.space.nodes_per_axis", "must be at least 1");
  SpaceGrid g;
  g.dim = d;
  g.nodes_per_axis = m;
  g.dx = 1.0 / m;
  g.cell_volume = std::pow(g.dx, d);
  return g;
}

SphereQuadrature build_sphere_quadrature(int d, int order) {
  std::vector<Vec> pts;
  std::vector<double> wts;
  if (d == 2) {
    if (order < 2 || order % 2 != 0)
      throw ValidationError("grid.sphere.order", "circle rule needs an even node count >= 2");
    for (int k = 0; k < order; ++k) {
      double th = 2.0 * std::numbers::pi * k / order;
      pts.push_back(Vec{std::cos(th), std::sin(th), 0.0});
      wts.push_back(2.0 * std::numbers::pi / order);
    }
    // Listing order 0, ..., pi - step, then the antipodes.
    return symmetrize(d, order, "circle-" + std::to_string(order), pts, wts);
  }
  if (d != 3) throw ValidationError("grid.dimension", "dimension must be 2 or 3");
  if (order < 2) throw ValidationError("grid.sphere.order", "order must be at least 2");
  const double fourpi = 4.0 * std::numbers::pi;
  if (order <= 3) {
    add_orbit(pts, wts, 1, 0, 0, fourpi / 6.0);
    return symmetrize(d, order, "octahedron-6", pts, wts);
  }
  const double r2 = 1.0 / std::sqrt(2.0), r3 = 1.0 / std::sqrt(3.0);
  if (order <= 5) {
    add_orbit(pts, wts, 1, 0, 0, fourpi / 15.0);
    add_orbit(pts, wts, r3, r3, r3, fourpi * 3.0 / 40.0);
    return symmetrize(d, order, "lebedev-14", pts, wts);
  }
  if (order <= 7) {
    add_orbit(pts, wts, 1, 0, 0, fourpi / 21.0);
    add_orbit(pts, wts, r2, r2, 0, fourpi * 4.0 / 105.0);
    add_orbit(pts, wts, r3, r3, r3, fourpi * 27.0 / 840.0);
    return symmetrize(d, order, "lebedev-26", pts, wts);
  }
  // Gauss-Legendre in cos(theta) times a half-offset uniform azimuth.
  const int nt = (order + 2) / 2;
  const int np = 2 * nt;
  std::vector<double> x, w;
  gauss_legendre(nt, x, w);
  for (int i = 0; i < nt; ++i) {
    double st = std::sqrt(std::max(0.0, 1.0 - x[i] * x[i]));
    for (int k = 0; k < np; ++k) {
      double ph = 2.0 * std::numbers::pi * (k + 0.5) / np;
      pts.push_back(Vec{st * std::cos(ph), st * std::sin(ph), x[i]});
      wts.push_back(w[i] * 2.0 * std::numbers::pi / np);
    }
  }
  return symmetrize(d, order, "product-" + std::to_string(nt) + "x" + std::to_string(np), pts, wts);
}

void check_shape(const Field& a, const Field& b, const char* where) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

Field operator+(const Field& a, const Field& b) {
  check_shape(a, b, "add");
  Field r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.data[i] += b.data[i];
  return r;
}

Field operator-(const Field& a, const Field& b) {
  check_shape(a, b, "subtract");
  Field r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.data[i] -= b.data[i];
  return r;
}

Field operator*(double s, const Field& a) {
  Field r = a;
  for (double& x : r.data) x *= s;
  return r;
}

Field hadamard(const Field& a, const Field& b) {
  check_shape(a, b, "hadamard");
  Field r = a;
  for (std::size_t i = 0; i < r.size(); ++i) r.data[i] *= b.data[i];
  return r;
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double x : f.data) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const Field& f) {
  return std::all_of(f.data.begin(), f.data.end(), [](double x) { return std::isfinite(x); });
}

std::pair<Vec, Vec> collide(const Vec& v, const Vec& v_star, const Vec& omega) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += (v[i] - v_star[i]) * omega[i];
  Vec a{}, b{};
  for (int i = 0; i < 3; ++i) {
    a[i] = v[i] - s * omega[i];
    b[i] = v_star[i] + s * omega[i];
  }
  return {a, b};
}

double interpolate(const Field& f, const PhaseGrid& g, const Vec& x, const Vec& v) {
  const VelocityGrid& vg = g.velocity;
  const SpaceGrid& sg = g.space;
  const int d = vg.dim;
  if (f.nv != vg.size() || f.nx != sg.size()) throw std::invalid_argument("interpolate: grid mismatch");

  IVec vb{0, 0, 0};
  Vec vf{0, 0, 0};
  for (int i = 0; i < d; ++i) {
    double t = v[i] / vg.dv;
    double r = std::round(t);
    if (std::abs(t - r) <= kSnap) t = r;
    double fl = std::floor(t);
    vb[i] = static_cast<int>(fl);
    vf[i] = t - fl;
  }
  IVec xb{0, 0, 0};
  Vec xf{0, 0, 0};
  for (int i = 0; i < d; ++i) {
    double t = x[i] / sg.dx;
    double fl = std::floor(t);
    xb[i] = static_cast<int>(fl);
    xf[i] = t - fl;
  }
  // Nested lerps a + t (b - a), one axis at a time, reproduce constants exactly.
  const int corners = 1 << d;
  auto collapse = [d](double* vals, const Vec& t) {
    for (int i = 0, n = 1 << d; i < d; ++i, n >>= 1)
      for (int c = 0; c < n / 2; ++c) vals[c] = vals[2 * c] + t[i] * (vals[2 * c + 1] - vals[2 * c]);
    return vals[0];
  };
  double vv[8];
  for (int cv = 0; cv < corners; ++cv) {
    IVec k = vb;
    bool live = true;
    for (int i = 0; i < d; ++i) {
      const bool up = (cv >> i) & 1;
      if (up && vf[i] == 0.0) live = false;
      k[i] += up ? 1 : 0;
    }
    vv[cv] = 0.0;
    if (!live) continue;
    const int iv = vg.find(k);
    if (iv < 0) throw std::out_of_range("interpolate: velocity outside the truncation ball");
    double xv[8];
    for (int cx = 0; cx < corners; ++cx) {
      IVec j = xb;
      for (int i = 0; i < d; ++i) j[i] += (cx >> i) & 1;
      xv[cx] = f(static_cast<std::size_t>(iv), sg.index(j));
    }
    vv[cv] = collapse(xv, xf);
  }
  return collapse(vv, vf);
}

}  // namespace hjlab
