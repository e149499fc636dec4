#ifndef ORLICZ_SUPERLIN_HPP
#define ORLICZ_SUPERLIN_HPP

#include <utility>

#include "orlicz/dirichlet.hpp"
#include "orlicz/energy.hpp"

namespace orlicz {

struct MountainPassConfig {
  double tol = 1e-8;        // dual-norm residual target for the climber
  int path_points = 20;     // segments of the discretized path
  int max_sweeps = 400;
  int min_sweeps = 3;       // path deformation sweeps before polishing starts
  double stall = 1e-12;     // smallest useful level decrease
  int stall_window = 40;
  double sign_tol = 1e-10;  // nodal sign tolerance for the truncated variants
  double slack = 1e-9;      // allowed dip of the level below r0
  double s_max = 1e6;       // endpoint scale cap
  double t_big = 10.0;      // superlinearity sampling starts here
  double tau_rel = 1e-12;
  double armijo_slope = 1e-4;
  unsigned long seed = 0;
  double polish_threshold = 10.0;  // residual below which Newton polish is tried
  SolverConfig lambda_cfg;         // settings for the eigenvalue estimate
};

// Everything the rim certification produced.  r0 underestimates the true
// mountain-pass level by construction; it only has to be positive.
struct GeometryCertificate {
  double r0 = 0.0;
  double rho0 = 0.0;       // radius attaining the certified bound
  double lambda1 = 0.0;    // estimated first eigenvalue of the base operator
  double lambda_small = 0.0;  // sampled small-t ratio g(t)/(t phi(t))
  double growth_C = 0.0;   // fitted constant in G <= (lambda1-eta) Phi + C Psi
  double embed_C = 0.0;    // sampled embedding constant into the Psi space
  Field endpoint;          // positive-direction field with J < 0
};

// Checks the superlinearity samples (ratios g(t)/t^{m-1} must climb beyond
// t_big), the small-t ratio against the estimated first eigenvalue, then
// assembles the rim bound over a radius grid and scales a bump until the
// functional goes negative.  Throws GeometryError when any stage fails.
GeometryCertificate certify_geometry(const NFunction& f_eps, const Nonlinearity& nl,
                                     const Mesh& mesh, const MountainPassConfig& cfg);

// Discretized path deformation: the maximal-energy point relaxes along the
// preconditioned negative gradient, the path re-tensions by arclength, and
// once the climber residual is small a Newton polish finishes it off.  The
// plus/minus variants work with the truncated functional and project the
// wrong-signed nodal values away.
std::pair<Field, SolveReport> mountain_pass_solve(const NFunction& f_eps,
                                                  const Nonlinearity& nl, Variant variant,
                                                  const Mesh& mesh,
                                                  const MountainPassConfig& cfg);

// (1 + |u|_{W^{1,Phi}}) * dual norm of J'(u)
double cerami_metric(const Field& u, const NFunction& f_eps, const Nonlinearity& nl,
                     Variant variant, const DualNorm& dual);

}  // namespace orlicz

#endif
