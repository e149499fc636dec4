#ifndef ORLICZ_MESH_HPP
#define ORLICZ_MESH_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "orlicz/nfunc.hpp"

namespace orlicz {

// Conforming P1 mesh of the unit interval (dim 1) or an axis-aligned
// rectangle triangulated into 2 triangles per cell (dim 2).  Immutable
// after construction; per-element quadrature data is precomputed.
//
// The one-point rule (midpoint / centroid) is exact for the element-wise
// constant integrands the P1 energy produces.
class Mesh {
public:
  static Mesh interval(int cells);                 // (0,1), n elements
  static Mesh unit_square(int nx, int ny);         // 2*nx*ny triangles
  static Mesh rectangle(int nx, int ny, double x0, double y0, double wx,
                        double wy);

  int dim() const { return dim_; }
  int num_nodes() const { return static_cast<int>(coords_.size() / dim_); }
  int num_elements() const { return static_cast<int>(conn_.size() / (dim_ + 1)); }
  int verts_per_element() const { return dim_ + 1; }
  double diameter() const { return diam_; }

  double coord(int node, int axis) const { return coords_[node * dim_ + axis]; }
  int vertex(int elem, int local) const { return conn_[elem * (dim_ + 1) + local]; }
  bool on_boundary(int node) const { return boundary_[node]; }
  const std::vector<bool>& boundary_mask() const { return boundary_; }

  // free (non-Dirichlet) node numbering for assembly
  int num_free() const { return num_free_; }
  int free_index(int node) const { return free_index_[node]; }

  double weight(int elem) const { return weight_[elem]; }       // length / area
  double total_measure() const { return total_measure_; }
  // gradient of the local basis function `local` on `elem`
  double basis_grad(int elem, int local, int axis) const {
    return grad_[(elem * (dim_ + 1) + local) * dim_ + axis];
  }
  double centroid(int elem, int axis) const { return centroid_[elem * dim_ + axis]; }
  // distance from the element centroid to the domain boundary
  double interior_distance(int elem) const { return bdist_[elem]; }

  std::string describe() const;

private:
  Mesh() = default;
  void finalize();

  int dim_ = 1;
  std::vector<double> coords_;
  std::vector<int> conn_;
  std::vector<bool> boundary_;
  std::vector<int> free_index_;
  int num_free_ = 0;
  double diam_ = 0.0;
  double total_measure_ = 0.0;
  std::array<double, 4> bbox_{};  // x0, y0, x1, y1
  std::vector<double> weight_, grad_, centroid_, bdist_;
};

Mesh build_mesh(int dim, int resolution);
Mesh build_mesh(int dim, int nx, int ny);

// Nodal P1 coefficient vector tied to a mesh.  With dirichlet_zero set
// (the default) boundary nodes are pinned to exactly 0.
class Field {
public:
  explicit Field(const Mesh& mesh, bool dirichlet_zero = true);
  Field(const Mesh& mesh, std::vector<double> nodal, bool dirichlet_zero = true);

  const Mesh& mesh() const { return *mesh_; }
  bool dirichlet_zero() const { return dirichlet_zero_; }
  std::span<const double> nodal() const { return nodal_; }
  double operator[](int node) const { return nodal_[node]; }
  double& operator[](int node) { return nodal_[node]; }
  int size() const { return static_cast<int>(nodal_.size()); }

  void enforce_dirichlet();           // re-pin boundary values to 0
  double value_at_quadrature(int elem) const;  // P1 value at the element point
  double max_abs() const;

private:
  const Mesh* mesh_;
  std::vector<double> nodal_;
  bool dirichlet_zero_;
};

// Piecewise-constant P1 gradient, dim entries per element.
std::vector<double> gradient_field(const Field& u);

// Euclidean norm of the element gradient, one entry per element.
std::vector<double> gradient_magnitudes(const Field& u);

// Quadrature sum of per-element values (one value per element point).
double integrate(std::span<const double> values, const Mesh& mesh);

// ---- discrete norms --------------------------------------------------------

// sum_e w_e |grad u|_e  (the W^{1,1} seminorm at quadrature resolution)
double w11_seminorm(const Field& u);

// Luxemburg norm of the gradient magnitude samples (discrete W^{1,Phi})
double w1phi_norm(const Field& u, const NFunction& f);

// Luxemburg norm of the quadrature-point values of u itself
double lphi_norm(const Field& u, const NFunction& f);

// quadrature L^q norm of element-point samples; q = infinity -> max
double lq_norm(std::span<const double> values, const Mesh& mesh, double q);

// measure space of the element-point samples of |u| (weights, values)
SampledMeasureSpace field_samples(const Field& u);
SampledMeasureSpace gradient_samples(const Field& u);

// difference of nodal vectors as a field on the shared mesh
Field field_difference(const Field& a, const Field& b);

// CSV with header: node_index, x[, y], value
void write_field_csv(const Field& u, const std::string& path);

}  // namespace orlicz

#endif
