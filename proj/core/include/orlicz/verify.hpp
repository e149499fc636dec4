#ifndef ORLICZ_VERIFY_HPP
#define ORLICZ_VERIFY_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orlicz/dirichlet.hpp"

namespace orlicz {

// Parameters of the interior norm ladder.  chi and beta are derived;
// validation rejects m >= N and q <= N/m, where they stop making sense.
struct MoserParams {
  double q = 4.0;   // integrability exponent of the source
  double m = 1.5;   // growth exponent (from the operator)
  double N = 2.0;   // dimension
  double k = 1.0;   // truncation level, > 0
  double r1 = 0.25; // radii of the interior sets, 0 < r2 < r1
  double r2 = 0.125;
  int n0 = 0;       // ladder index entering the bound
  int n_max = 8;
  std::optional<double> frozen_C;  // calibration constant, fitted once

  double chi() const { return N / (N - m); }
  double beta() const { return N / (m * (m * q - N)); }
  void validate() const;
};

struct NormLadder {
  std::vector<double> exponents;  // m chi^n
  std::vector<double> radii;      // R_n = r2 + (r1 - r2)/2^n
  std::vector<double> measures;   // measure of the interior set at R_n
  std::vector<double> levels;     // L^{m chi^n} norm of max(u, k) there
  double sup_estimate = 0.0;      // measure-normalized extrapolation
  double fnorm_q = 0.0;           // quadrature L^q norm of the source
  double bound_value = 0.0;       // shaped bound, when frozen_C is present
  double bound_bracket = 0.0;     // the bound without the level(n0) prefactor
  bool bound_ok = true;
};

// Interior sets are unions of elements whose centroids sit deeper than R_n;
// levels are computed in log space so the large exponents cannot overflow.
NormLadder moser_ladder(const Field& u, const SourceTerm& f, const MoserParams& params);

// Smallest constant making the shaped bound
//   sup <= [C/(r1-r2) (1 + |f|_q^beta / k^{beta(m-1)})]^{1/(chi-1)} level(n0)
// tight on the given run.  Fit once on a calibration problem, then freeze.
double fit_moser_constant(const Field& u, const SourceTerm& f, MoserParams params);

struct PoincareReport {
  int checked = 0;
  double diam = 0.0;
  double lambda1_est = 0.0;
  std::vector<int> norm_violations;    // |u|_Phi > 2 d |grad u|_Phi
  std::vector<int> lambda_violations;  // lambda1 \int Phi(u) > \int Phi(|grad u|)
  double max_norm_ratio = 0.0;         // max over fields of |u| / (2d |grad u|)
  bool pass() const { return norm_violations.empty() && lambda_violations.empty(); }
};

PoincareReport poincare_check(std::span<const Field> fields, const NFunction& f_op,
                              double lambda1_est);

// Mesh-convergence study against a closed-form 1D solution.
struct ConvergenceProblem {
  std::string name;
  std::string operator_spec;                 // catalog operator
  double f_const = 1.0;                      // constant source
  std::function<double(double)> exact;       // nodal oracle on (0,1)
};

struct RateRow {
  int cells = 0;
  double h = 0.0;
  double err_linf = 0.0;   // nodes and element midpoints
  double err_w1phi = 0.0;  // Luxemburg norm of the gradient error
};

struct RateTable {
  std::vector<RateRow> rows;
  double rate_linf = 0.0;   // least-squares slope in log-log
  double rate_w1phi = 0.0;
};

RateTable convergence_study(const ConvergenceProblem& problem,
                            std::span<const int> mesh_ladder, const SolverConfig& cfg);

}  // namespace orlicz

#endif
