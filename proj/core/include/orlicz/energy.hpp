#ifndef ORLICZ_ENERGY_HPP
#define ORLICZ_ENERGY_HPP

#include <memory>
#include <span>
#include <vector>

#include "orlicz/mesh.hpp"
#include "orlicz/nonlinearity.hpp"
#include "orlicz/source.hpp"

namespace orlicz {

struct EnergyValue {
  double total = 0.0;            // dirichlet_part - load_part
  double dirichlet_part = 0.0;   // integral of Phi(|grad u|)
  double load_part = 0.0;        // integral of f u, or of G(x,u)
};

// I(u) = \int Phi(|grad u|) - f u, one-point quadrature per element.
EnergyValue energy_linear(const Field& u, const NFunction& f_op, const SourceTerm& f);

// Exact gradient of the discrete I: entry i is
// \int phi(|grad u|) grad u . grad v_i - \int f v_i, one entry per free node.
std::vector<double> residual_linear(const Field& u, const NFunction& f_op,
                                    const SourceTerm& f);

// Action of the second derivative of the gradient term on w: element tensor
// phi(|g|) Id + (phi'(|g|)/|g|) g (x) g with g = grad u; below the relative
// threshold tau the isotropic clamped value phi(tau) Id is used.
std::vector<double> hessian_apply(const Field& u, const NFunction& f_op,
                                  const Field& w, double tau_rel = 1e-12);

// J(u) = \int Phi_eps(|grad u|) - \int G(x,u), with the signed primitive
// for the truncated variants.
EnergyValue energy_superlinear(const Field& u, const NFunction& f_eps,
                               const Nonlinearity& nl, Variant variant);

std::vector<double> residual_superlinear(const Field& u, const NFunction& f_eps,
                                         const Nonlinearity& nl, Variant variant);

// \int gbar(x, u) dx with gbar(t) = t g(t) - m G(t); m from the driving
// N-function.
double gbar_integral(const Field& u, const Nonlinearity& nl, double m);

// Dual norm of residual vectors through the H^1_0 Riesz map: factorizes the
// P1 Poisson stiffness on the free nodes once per mesh, then
// |r|_* = sqrt(r . A^{-1} r).  One definition shared by every solver.
class DualNorm {
public:
  explicit DualNorm(const Mesh& mesh);
  double operator()(std::span<const double> residual) const;

private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace orlicz

#endif
