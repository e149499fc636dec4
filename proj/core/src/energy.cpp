#include "orlicz/energy.hpp"

#include <cmath>
#include <vector>

#include "fem_internal.hpp"
#include "orlicz/parallel.hpp"

namespace orlicz {

namespace {

void check_conforming(const Field& u) {
  if (!u.dirichlet_zero())
    throw MeshMismatchError("field must be Dirichlet-conforming (boundary pinned to 0)");
}

}  // namespace

// ---- linear problem ---------------------------------------------------------

EnergyValue energy_linear(const Field& u, const NFunction& f_op, const SourceTerm& f) {
  check_conforming(u);
  const Mesh& mesh = u.mesh();
  const auto mag = gradient_magnitudes(u);
  const auto fs = f.sample(mesh);
  EnergyValue ev;
  ev.dirichlet_part = chunked_sum(mag.size(), [&](std::size_t e) {
    return mesh.weight(static_cast<int>(e)) * f_op.Phi(mag[e]);
  });
  ev.load_part = chunked_sum(fs.size(), [&](std::size_t e) {
    return mesh.weight(static_cast<int>(e)) * fs[e] *
           u.value_at_quadrature(static_cast<int>(e));
  });
  ev.total = ev.dirichlet_part - ev.load_part;
  return ev;
}

std::vector<double> residual_linear(const Field& u, const NFunction& f_op,
                                    const SourceTerm& f) {
  check_conforming(u);
  const Mesh& mesh = u.mesh();
  const int d = mesh.dim(), nv = mesh.verts_per_element();
  const auto grad = gradient_field(u);
  const auto fs = f.sample(mesh);
  std::vector<double> r(mesh.num_free(), 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double gm = 0.0;
    for (int ax = 0; ax < d; ++ax) gm += grad[e * d + ax] * grad[e * d + ax];
    gm = std::sqrt(gm);
    const double coef = gm > 0.0 ? f_op.phi(gm) : 0.0;
    const double w = mesh.weight(e);
    for (int l = 0; l < nv; ++l) {
      const int fi = mesh.free_index(mesh.vertex(e, l));
      if (fi < 0) continue;
      double flow = 0.0;
      for (int ax = 0; ax < d; ++ax)
        flow += grad[e * d + ax] * mesh.basis_grad(e, l, ax);
      r[fi] += w * (coef * flow - fs[e] / nv);
    }
  }
  return r;
}

// ---- second derivative --------------------------------------------------------

namespace detail {

double gradient_clamp(const Field& u, double tau_rel) {
  const double mean = w11_seminorm(u) / u.mesh().total_measure();
  return tau_rel * (mean > 0.0 ? mean : 1.0);
}

void gradient_tensor(const NFunction& f, const double* g, int dim, double tau,
                     double* tensor) {
  double gm = 0.0;
  for (int ax = 0; ax < dim; ++ax) gm += g[ax] * g[ax];
  gm = std::sqrt(gm);
  if (gm <= tau) {
    const double c = f.phi(tau);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) tensor[a * dim + b] = (a == b) ? c : 0.0;
    return;
  }
  const double c1 = f.phi(gm);
  const double c2 = f.dphi(gm) / gm;
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      tensor[a * dim + b] = c2 * g[a] * g[b] + ((a == b) ? c1 : 0.0);
}

SpMat assemble_gradient_hessian(const Field& u, const NFunction& f, double tau_rel) {
  const Mesh& mesh = u.mesh();
  const int d = mesh.dim(), nv = mesh.verts_per_element();
  const double tau = gradient_clamp(u, tau_rel);
  const auto grad = gradient_field(u);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * nv * nv);
  double tensor[4];
  for (int e = 0; e < mesh.num_elements(); ++e) {
    gradient_tensor(f, &grad[e * d], d, tau, tensor);
    const double w = mesh.weight(e);
    for (int li = 0; li < nv; ++li) {
      const int fi = mesh.free_index(mesh.vertex(e, li));
      if (fi < 0) continue;
      for (int lj = 0; lj < nv; ++lj) {
        const int fj = mesh.free_index(mesh.vertex(e, lj));
        if (fj < 0) continue;
        double val = 0.0;
        for (int a = 0; a < d; ++a)
          for (int b = 0; b < d; ++b)
            val += mesh.basis_grad(e, li, a) * tensor[a * d + b] *
                   mesh.basis_grad(e, lj, b);
        trip.emplace_back(fi, fj, w * val);
      }
    }
  }
  SpMat h(mesh.num_free(), mesh.num_free());
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

SpMat assemble_weighted_mass(const Mesh& mesh, const std::vector<double>& c) {
  const int nv = mesh.verts_per_element();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.num_elements()) * nv * nv);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double val = mesh.weight(e) * c[e] / (nv * nv);
    for (int li = 0; li < nv; ++li) {
      const int fi = mesh.free_index(mesh.vertex(e, li));
      if (fi < 0) continue;
      for (int lj = 0; lj < nv; ++lj) {
        const int fj = mesh.free_index(mesh.vertex(e, lj));
        if (fj < 0) continue;
        trip.emplace_back(fi, fj, val);
      }
    }
  }
  SpMat m(mesh.num_free(), mesh.num_free());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat assemble_poisson(const Mesh& mesh) {
  Field zero(mesh);
  PowerNFunction laplace(2.0);
  return assemble_gradient_hessian(zero, laplace, 1e-12);
}

Vec to_vec(std::span<const double> r) {
  Vec v(static_cast<Eigen::Index>(r.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = r[i];
  return v;
}

std::vector<double> to_std(const Vec& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

void add_free_increment(Field& u, const Vec& delta, double step) {
  const Mesh& mesh = u.mesh();
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const int fi = mesh.free_index(i);
    if (fi >= 0) u[i] += step * delta[fi];
  }
}

}  // namespace detail

std::vector<double> hessian_apply(const Field& u, const NFunction& f_op,
                                  const Field& w, double tau_rel) {
  if (&u.mesh() != &w.mesh())
    throw MeshMismatchError("hessian_apply: fields on different meshes");
  const Mesh& mesh = u.mesh();
  const int d = mesh.dim(), nv = mesh.verts_per_element();
  const double tau = detail::gradient_clamp(u, tau_rel);
  const auto gu = gradient_field(u);
  const auto gw = gradient_field(w);
  std::vector<double> r(mesh.num_free(), 0.0);
  double tensor[4];
  for (int e = 0; e < mesh.num_elements(); ++e) {
    detail::gradient_tensor(f_op, &gu[e * d], d, tau, tensor);
    double tw[2] = {0.0, 0.0};
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) tw[a] += tensor[a * d + b] * gw[e * d + b];
    const double wgt = mesh.weight(e);
    for (int l = 0; l < nv; ++l) {
      const int fi = mesh.free_index(mesh.vertex(e, l));
      if (fi < 0) continue;
      double val = 0.0;
      for (int a = 0; a < d; ++a) val += tw[a] * mesh.basis_grad(e, l, a);
      r[fi] += wgt * val;
    }
  }
  return r;
}

// ---- superlinear functional -----------------------------------------------------

EnergyValue energy_superlinear(const Field& u, const NFunction& f_eps,
                               const Nonlinearity& nl, Variant variant) {
  check_conforming(u);
  const Mesh& mesh = u.mesh();
  const auto mag = gradient_magnitudes(u);
  EnergyValue ev;
  ev.dirichlet_part = chunked_sum(mag.size(), [&](std::size_t e) {
    return mesh.weight(static_cast<int>(e)) * f_eps.Phi(mag[e]);
  });
  ev.load_part = chunked_sum(static_cast<std::size_t>(mesh.num_elements()), [&](std::size_t ee) {
    const int e = static_cast<int>(ee);
    const double c = nl.coeff_at(mesh.centroid(e, 0),
                                 mesh.dim() == 2 ? mesh.centroid(e, 1) : 0.0);
    return mesh.weight(e) * c * nl.G_trunc(u.value_at_quadrature(e), variant);
  });
  ev.total = ev.dirichlet_part - ev.load_part;
  return ev;
}

std::vector<double> residual_superlinear(const Field& u, const NFunction& f_eps,
                                         const Nonlinearity& nl, Variant variant) {
  check_conforming(u);
  const Mesh& mesh = u.mesh();
  const int d = mesh.dim(), nv = mesh.verts_per_element();
  const auto grad = gradient_field(u);
  std::vector<double> r(mesh.num_free(), 0.0);
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double gm = 0.0;
    for (int ax = 0; ax < d; ++ax) gm += grad[e * d + ax] * grad[e * d + ax];
    gm = std::sqrt(gm);
    const double coef = gm > 0.0 ? f_eps.phi(gm) : 0.0;
    const double c = nl.coeff_at(mesh.centroid(e, 0),
                                 mesh.dim() == 2 ? mesh.centroid(e, 1) : 0.0);
    const double gval = c * nl.g_trunc(u.value_at_quadrature(e), variant);
    const double w = mesh.weight(e);
    for (int l = 0; l < nv; ++l) {
      const int fi = mesh.free_index(mesh.vertex(e, l));
      if (fi < 0) continue;
      double flow = 0.0;
      for (int ax = 0; ax < d; ++ax)
        flow += grad[e * d + ax] * mesh.basis_grad(e, l, ax);
      r[fi] += w * (coef * flow - gval / nv);
    }
  }
  return r;
}

double gbar_integral(const Field& u, const Nonlinearity& nl, double m) {
  const Mesh& mesh = u.mesh();
  return chunked_sum(static_cast<std::size_t>(mesh.num_elements()), [&](std::size_t ee) {
    const int e = static_cast<int>(ee);
    const double c = nl.coeff_at(mesh.centroid(e, 0),
                                 mesh.dim() == 2 ? mesh.centroid(e, 1) : 0.0);
    return mesh.weight(e) * c * nl.gbar(u.value_at_quadrature(e), m);
  });
}

// ---- dual norm ----------------------------------------------------------------

struct DualNorm::Impl {
  Eigen::SimplicialLDLT<detail::SpMat> solver;
};

DualNorm::DualNorm(const Mesh& mesh) {
  auto impl = std::make_shared<Impl>();
  impl->solver.compute(detail::assemble_poisson(mesh));
  if (impl->solver.info() != Eigen::Success)
    throw std::runtime_error("DualNorm: Poisson factorization failed");
  impl_ = std::move(impl);
}

double DualNorm::operator()(std::span<const double> residual) const {
  const detail::Vec r = detail::to_vec(residual);
  const detail::Vec z = impl_->solver.solve(r);
  const double v = r.dot(z);
  return v > 0.0 ? std::sqrt(v) : 0.0;
}

}  // namespace orlicz
