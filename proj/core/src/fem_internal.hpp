// Internal Eigen-based assembly shared by the solver translation units.
// Not installed; public headers stay STL-only.
#ifndef ORLICZ_FEM_INTERNAL_HPP
#define ORLICZ_FEM_INTERNAL_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "orlicz/energy.hpp"
#include "orlicz/mesh.hpp"
#include "orlicz/nonlinearity.hpp"

namespace orlicz::detail {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Quadrature element tensor of the gradient term at grad u, clamped to the
// isotropic value below tau (absolute, derived from tau_rel by the caller).
void gradient_tensor(const NFunction& f, const double* g, int dim, double tau,
                     double* tensor /* dim x dim row major */);

// threshold: tau_rel * mean element |grad u| (falls back to tau_rel when the
// field is flat)
double gradient_clamp(const Field& u, double tau_rel);

// second derivative of \int Phi(|grad u|) on the free nodes
SpMat assemble_gradient_hessian(const Field& u, const NFunction& f, double tau_rel);

// mass-like matrix  sum_e w_e c(e) v_i(x_e) v_j(x_e)  with c(e) given per element
SpMat assemble_weighted_mass(const Mesh& mesh, const std::vector<double>& c);

// P1 Poisson stiffness on the free nodes
SpMat assemble_poisson(const Mesh& mesh);

Vec to_vec(std::span<const double> r);
std::vector<double> to_std(const Vec& v);

// scatter a free-node increment into a full nodal field (boundary stays 0)
void add_free_increment(Field& u, const Vec& delta, double step);

}  // namespace orlicz::detail

#endif
