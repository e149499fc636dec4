#ifndef ORLICZ_DIRICHLET_HPP
#define ORLICZ_DIRICHLET_HPP

#include <optional>
#include <utility>

#include "orlicz/energy.hpp"
#include "orlicz/solve_report.hpp"

namespace orlicz {

struct SolverConfig {
  double tol = 1e-10;        // dual-norm residual target (inner solves)
  int max_iters = 200;
  double armijo_slope = 1e-4;
  int max_backtracks = 60;
  double tau_rel = 1e-12;    // gradient-singularity clamp, relative
  unsigned long seed = 0;

  // continuation extras
  double tol_final = 1e-9;   // unregularized residual at the end of the ladder
  double R_cap = 1e4;        // cap on the bound monitor entries
  double pairing_tol = 1e-2; // tail tolerance in the limit-passage diagnostic
};

// Strictly decreasing regularization ladder; construction validates that the
// tail reaches at least two orders below the head.
struct ContinuationSchedule {
  std::vector<double> eps_values;
  bool warm_start = true;

  static ContinuationSchedule geometric(int steps = 10);  // 2^0 .. 2^-steps
  void validate() const;
};

// Damped-Newton minimization of I(u) = \int Phi(|grad u|) - f u.
// Requires a lower growth index above 1 (use a regularized operator
// otherwise); energy decreases across iterates; independent restarts land
// on the same field because I is strictly convex.
std::pair<Field, SolveReport> solve_reflexive(const Mesh& mesh, const NFunction& f_op,
                                              const SourceTerm& f, const SolverConfig& cfg,
                                              const Field* initial = nullptr);

// Regularized continuation for operators with lower index 1: solves the
// eps-problems down the ladder with warm starts, monitors the a-priori
// gradient integrals against a single cap, then polishes the unregularized
// problem (the discrete functional stays smooth and strictly convex) until
// its residual passes tol_final.
std::pair<Field, SolveReport> solve_continuation(const Mesh& mesh, const NFunction& f_op,
                                                 const SourceTerm& f,
                                                 const ContinuationSchedule& schedule,
                                                 const SolverConfig& cfg,
                                                 const Field* initial = nullptr);

// \int (phi(|grad u|) grad u - phi(|grad v|) grad v) . (grad u - grad v) dx;
// strictly positive for distinct fields, exactly zero for equal ones.
double monotonicity_gap(const Field& u, const Field& v, const NFunction& f_op);

// Smallest value of \int Phi(|grad u|) / \int Phi(u) found by normalized
// projected descent with a multiplicative scale search.  If the descent
// budget runs out `converged` (when given) reports false and the best value
// seen is returned.
double estimate_lambda1(const Mesh& mesh, const NFunction& f_op, const SolverConfig& cfg,
                        bool* converged = nullptr);

// Computable shadow of the strong-convergence upgrade: the pairing tail must
// vanish and the cross-eps increments must shrink.
struct SPlusVerdict {
  bool pass = false;
  bool pairing_ok = false;
  bool increments_ok = false;
  double max_tail_pairing = 0.0;
  std::vector<int> offending_entries;
};

SPlusVerdict s_plus_diagnostic(const SolveReport& report, double pairing_tol = 1e-2);

}  // namespace orlicz

#endif
