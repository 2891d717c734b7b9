#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hjlab {

using Vec = std::array<double, 3>;
using IVec = std::array<int, 3>;

class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Cartesian lattice points v = k*dv with |v| <= R, k in [-half, half]^d.
// Unused trailing components (d = 2) are zero.
struct VelocityGrid {
  int dim = 3;
  double radius = 0.0;
  int nodes_per_axis = 0;
  int half = 0;
  double dv = 0.0;
  double cell_volume = 0.0;
  std::vector<IVec> lattice;
  std::vector<Vec> nodes;
  std::vector<double> speed2;
  // Dense map over the cube padded by one layer: [-half-1, half+1]^d.
  // Entries outside the ball hold the sentinel size().
  std::vector<int> index_map;
  int padded_axis = 0;
  std::array<std::ptrdiff_t, 3> stride{0, 0, 0};

  std::size_t size() const { return nodes.size(); }
  bool in_ball(const IVec& k) const;
  std::ptrdiff_t padded_offset(const IVec& k) const;
  // -1 when k is not a stored node.
  int find(const IVec& k) const;
};

VelocityGrid build_velocity_grid(int d, double R, int n);

// Uniform periodic lattice x_j = j/m on the unit torus; m = 1 is homogeneous.
struct SpaceGrid {
  int dim = 3;
  int nodes_per_axis = 1;
  double dx = 1.0;
  double cell_volume = 1.0;
  std::size_t size() const;
  IVec coords(std::size_t ix) const;
  std::size_t index(const IVec& j) const;
  Vec position(std::size_t ix) const;
};

SpaceGrid build_space_grid(int d, int m);

// Nodes are stored as [hemisphere..., -hemisphere...] with identical weights.
struct SphereQuadrature {
  int dim = 3;
  int order = 0;
  std::string name;
  std::vector<Vec> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
  std::size_t hemisphere() const { return nodes.size() / 2; }
};

SphereQuadrature build_sphere_quadrature(int d, int order);

struct PhaseGrid {
  SpaceGrid space;
  VelocityGrid velocity;
  SphereQuadrature sphere;
  double volume() const { return space.cell_volume * velocity.cell_volume; }
};

// Values stored velocity-major: data[iv * nx + ix].
struct Field {
  std::size_t nv = 0;
  std::size_t nx = 0;
  std::vector<double> data;

  Field() = default;
  Field(std::size_t nv_, std::size_t nx_, double value = 0.0)
      : nv(nv_), nx(nx_), data(nv_ * nx_, value) {}
  static Field zeros(const PhaseGrid& g) { return Field(g.velocity.size(), g.space.size()); }

  double& operator()(std::size_t iv, std::size_t ix) { return data[iv * nx + ix]; }
  double operator()(std::size_t iv, std::size_t ix) const { return data[iv * nx + ix]; }
  double* row(std::size_t iv) { return data.data() + iv * nx; }
  const double* row(std::size_t iv) const { return data.data() + iv * nx; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Field& o) const { return nv == o.nv && nx == o.nx; }
};

void check_shape(const Field& a, const Field& b, const char* where);
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(double s, const Field& a);
Field hadamard(const Field& a, const Field& b);
double max_abs(const Field& f);
bool all_finite(const Field& f);

// Lattice coordinate snapping tolerance applied to post-collision points.
inline constexpr double kSnap = 1e-9;

std::pair<Vec, Vec> collide(const Vec& v, const Vec& v_star, const Vec& omega);

// Multilinear in v, periodic multilinear in x.  Throws std::out_of_range when a
// stencil node carrying nonzero weight lies outside the velocity ball.
double interpolate(const Field& f, const PhaseGrid& g, const Vec& x, const Vec& v);

}  // namespace hjlab
