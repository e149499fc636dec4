#include "orlicz/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "orlicz/errors.hpp"
#include "orlicz/parallel.hpp"

namespace orlicz {

Mesh Mesh::interval(int cells) {
  if (cells < 2) throw ConfigError("mesh resolution must be >= 2 cells");
  Mesh m;
  m.dim_ = 1;
  const int n = cells + 1;
  m.coords_.resize(n);
  for (int i = 0; i < n; ++i) m.coords_[i] = static_cast<double>(i) / cells;
  m.conn_.resize(2 * cells);
  for (int e = 0; e < cells; ++e) {
    m.conn_[2 * e] = e;
    m.conn_[2 * e + 1] = e + 1;
  }
  m.boundary_.assign(n, false);
  m.boundary_[0] = m.boundary_[n - 1] = true;
  m.bbox_ = {0.0, 0.0, 1.0, 0.0};
  m.finalize();
  return m;
}

Mesh Mesh::rectangle(int nx, int ny, double x0, double y0, double wx, double wy) {
  if (nx < 2 || ny < 2) throw ConfigError("mesh resolution must be >= 2 cells per direction");
  Mesh m;
  m.dim_ = 2;
  const int nnx = nx + 1, nny = ny + 1;
  m.coords_.resize(2 * nnx * nny);
  for (int j = 0; j < nny; ++j)
    for (int i = 0; i < nnx; ++i) {
      const int id = j * nnx + i;
      m.coords_[2 * id] = x0 + wx * i / nx;
      m.coords_[2 * id + 1] = y0 + wy * j / ny;
    }
  // two triangles per cell, diagonal from (i,j) to (i+1,j+1)
  m.conn_.reserve(6 * nx * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = j * nnx + i;
      const int b = a + 1;
      const int c = a + nnx;
      const int d = c + 1;
      m.conn_.insert(m.conn_.end(), {a, b, d});
      m.conn_.insert(m.conn_.end(), {a, d, c});
    }
  m.boundary_.assign(nnx * nny, false);
  for (int j = 0; j < nny; ++j)
    for (int i = 0; i < nnx; ++i)
      if (i == 0 || j == 0 || i == nx || j == ny) m.boundary_[j * nnx + i] = true;
  m.bbox_ = {x0, y0, x0 + wx, y0 + wy};
  m.finalize();
  return m;
}

Mesh Mesh::unit_square(int nx, int ny) { return rectangle(nx, ny, 0.0, 0.0, 1.0, 1.0); }

Mesh build_mesh(int dim, int resolution) {
  if (dim == 1) return Mesh::interval(resolution);
  if (dim == 2) return Mesh::unit_square(resolution, resolution);
  throw ConfigError("mesh dimension must be 1 or 2");
}

Mesh build_mesh(int dim, int nx, int ny) {
  if (dim == 1) return Mesh::interval(nx);
  if (dim == 2) return Mesh::unit_square(nx, ny);
  throw ConfigError("mesh dimension must be 1 or 2");
}

void Mesh::finalize() {
  const int nelem = num_elements();
  const int nv = verts_per_element();
  weight_.resize(nelem);
  grad_.assign(static_cast<std::size_t>(nelem) * nv * dim_, 0.0);
  centroid_.assign(static_cast<std::size_t>(nelem) * dim_, 0.0);
  bdist_.resize(nelem);
  total_measure_ = 0.0;

  for (int e = 0; e < nelem; ++e) {
    if (dim_ == 1) {
      const int a = vertex(e, 0), b = vertex(e, 1);
      const double h = coords_[b] - coords_[a];
      if (!(h > 0.0)) throw ConfigError("element with nonpositive measure");
      weight_[e] = h;
      grad_[(e * nv + 0) * dim_] = -1.0 / h;
      grad_[(e * nv + 1) * dim_] = 1.0 / h;
      centroid_[e] = 0.5 * (coords_[a] + coords_[b]);
    } else {
      const int a = vertex(e, 0), b = vertex(e, 1), c = vertex(e, 2);
      const double ax = coord(a, 0), ay = coord(a, 1);
      const double bx = coord(b, 0), by = coord(b, 1);
      const double cx = coord(c, 0), cy = coord(c, 1);
      const double det = (bx - ax) * (cy - ay) - (cx - ax) * (by - ay);
      if (!(det > 0.0)) throw ConfigError("element with nonpositive measure");
      weight_[e] = 0.5 * det;
      // grad of barycentric basis: rotate opposite edge by 90 degrees / det
      grad_[(e * nv + 0) * 2 + 0] = (by - cy) / det;
      grad_[(e * nv + 0) * 2 + 1] = (cx - bx) / det;
      grad_[(e * nv + 1) * 2 + 0] = (cy - ay) / det;
      grad_[(e * nv + 1) * 2 + 1] = (ax - cx) / det;
      grad_[(e * nv + 2) * 2 + 0] = (ay - by) / det;
      grad_[(e * nv + 2) * 2 + 1] = (bx - ax) / det;
      centroid_[e * 2 + 0] = (ax + bx + cx) / 3.0;
      centroid_[e * 2 + 1] = (ay + by + cy) / 3.0;
    }
    total_measure_ += weight_[e];
  }

  // diameter: max pairwise distance of the bounding box corners equals the
  // max pairwise node distance for these tensor meshes
  if (dim_ == 1) {
    diam_ = bbox_[2] - bbox_[0];
  } else {
    const double dx = bbox_[2] - bbox_[0], dy = bbox_[3] - bbox_[1];
    diam_ = std::sqrt(dx * dx + dy * dy);
  }

  for (int e = 0; e < nelem; ++e) {
    if (dim_ == 1) {
      const double x = centroid_[e];
      bdist_[e] = std::min(x - bbox_[0], bbox_[2] - x);
    } else {
      const double x = centroid_[e * 2], y = centroid_[e * 2 + 1];
      bdist_[e] = std::min(std::min(x - bbox_[0], bbox_[2] - x),
                           std::min(y - bbox_[1], bbox_[3] - y));
    }
  }

  free_index_.assign(num_nodes(), -1);
  num_free_ = 0;
  for (int i = 0; i < num_nodes(); ++i)
    if (!boundary_[i]) free_index_[i] = num_free_++;
}

std::string Mesh::describe() const {
  std::ostringstream os;
  os << (dim_ == 1 ? "interval" : "rectangle") << " dim=" << dim_
     << " nodes=" << num_nodes() << " elements=" << num_elements()
     << " diam=" << diam_;
  return os.str();
}

// ---- Field ------------------------------------------------------------------

Field::Field(const Mesh& mesh, bool dirichlet_zero)
    : mesh_(&mesh), nodal_(mesh.num_nodes(), 0.0), dirichlet_zero_(dirichlet_zero) {}

Field::Field(const Mesh& mesh, std::vector<double> nodal, bool dirichlet_zero)
    : mesh_(&mesh), nodal_(std::move(nodal)), dirichlet_zero_(dirichlet_zero) {
  if (static_cast<int>(nodal_.size()) != mesh.num_nodes())
    throw MeshMismatchError("nodal vector size does not match mesh");
  if (dirichlet_zero_) enforce_dirichlet();
}

void Field::enforce_dirichlet() {
  for (int i = 0; i < mesh_->num_nodes(); ++i)
    if (mesh_->on_boundary(i)) nodal_[i] = 0.0;
}

double Field::value_at_quadrature(int elem) const {
  const int nv = mesh_->verts_per_element();
  double v = 0.0;
  for (int l = 0; l < nv; ++l) v += nodal_[mesh_->vertex(elem, l)];
  return v / nv;
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : nodal_) m = std::max(m, std::fabs(v));
  return m;
}

std::vector<double> gradient_field(const Field& u) {
  const Mesh& mesh = u.mesh();
  const int d = mesh.dim(), nv = mesh.verts_per_element();
  std::vector<double> g(static_cast<std::size_t>(mesh.num_elements()) * d, 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e)
    for (int l = 0; l < nv; ++l) {
      const double c = u[mesh.vertex(e, l)];
      for (int ax = 0; ax < d; ++ax) g[e * d + ax] += c * mesh.basis_grad(e, l, ax);
    }
  return g;
}

std::vector<double> gradient_magnitudes(const Field& u) {
  const Mesh& mesh = u.mesh();
  const int d = mesh.dim();
  auto g = gradient_field(u);
  std::vector<double> mag(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double s = 0.0;
    for (int ax = 0; ax < d; ++ax) s += g[e * d + ax] * g[e * d + ax];
    mag[e] = std::sqrt(s);
  }
  return mag;
}

double integrate(std::span<const double> values, const Mesh& mesh) {
  if (static_cast<int>(values.size()) != mesh.num_elements())
    throw MeshMismatchError("integrate: one value per element point required");
  return chunked_sum(values.size(),
                     [&](std::size_t e) { return mesh.weight(static_cast<int>(e)) * values[e]; });
}

double w11_seminorm(const Field& u) {
  auto mag = gradient_magnitudes(u);
  return integrate(mag, u.mesh());
}

SampledMeasureSpace gradient_samples(const Field& u) {
  const Mesh& mesh = u.mesh();
  SampledMeasureSpace s;
  s.values = gradient_magnitudes(u);
  s.weights.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) s.weights[e] = mesh.weight(e);
  return s;
}

SampledMeasureSpace field_samples(const Field& u) {
  const Mesh& mesh = u.mesh();
  SampledMeasureSpace s;
  s.weights.resize(mesh.num_elements());
  s.values.resize(mesh.num_elements());
  for (int e = 0; e < mesh.num_elements(); ++e) {
    s.weights[e] = mesh.weight(e);
    s.values[e] = u.value_at_quadrature(e);
  }
  return s;
}

double w1phi_norm(const Field& u, const NFunction& f) {
  return luxemburg_norm(gradient_samples(u), f);
}

double lphi_norm(const Field& u, const NFunction& f) {
  return luxemburg_norm(field_samples(u), f);
}

double lq_norm(std::span<const double> values, const Mesh& mesh, double q) {
  if (static_cast<int>(values.size()) != mesh.num_elements())
    throw MeshMismatchError("lq_norm: one value per element point required");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
  }
  double acc = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e)
    acc += mesh.weight(e) * std::pow(std::fabs(values[e]), q);
  return std::pow(acc, 1.0 / q);
}

Field field_difference(const Field& a, const Field& b) {
  if (&a.mesh() != &b.mesh() || a.size() != b.size())
    throw MeshMismatchError("field_difference: fields live on different meshes");
  std::vector<double> d(a.size());
  for (int i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return Field(a.mesh(), std::move(d), a.dirichlet_zero() && b.dirichlet_zero());
}

void write_field_csv(const Field& u, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw ConfigError("cannot open output file: " + path);
  const Mesh& mesh = u.mesh();
  out << (mesh.dim() == 1 ? "node_index,x,value\n" : "node_index,x,y,value\n");
  char buf[96];
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    out << i;
    for (int ax = 0; ax < mesh.dim(); ++ax) {
      std::snprintf(buf, sizeof(buf), ",%.17g", mesh.coord(i, ax));
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.17g\n", u[i]);
    out << buf;
  }
}

}  // namespace orlicz
