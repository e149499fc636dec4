#ifndef ORLICZ_NFUNC_HPP
#define ORLICZ_NFUNC_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/errors.hpp"

namespace orlicz {

// An N-function given through its density: Phi(t) = \int_0^t s phi(s) ds.
// phi is defined for t >= 0 with phi(0) taken as the limit from the right;
// the flux t*phi(t) is extended by 0 at t = 0.  Phi is even in t.
//
// ell/em are the growth indices bounding 1 + (t phi(t))'/phi(t), and
// a_const = inf_{t>0} t^em / Phi(t).  Catalog implementations store the
// closed-form values; estimated ones come from growth_indices().
//
// All evaluations are pure and safe to call concurrently.
class NFunction {
public:
  virtual ~NFunction() = default;

  virtual double phi(double t) const = 0;   // density, t >= 0
  virtual double dphi(double t) const = 0;  // phi'(t)
  virtual double Phi(double t) const = 0;   // accepts any t, even extension

  // Phi'(t) = t phi(t) for t > 0, extended by 0 at t = 0.
  double flux(double t) const { return t > 0.0 ? t * phi(t) : 0.0; }

  double ell() const { return ell_; }
  double em() const { return em_; }
  double a_const() const { return a_; }
  const std::string& name() const { return name_; }
  const std::string& kind() const { return kind_; }

protected:
  NFunction(std::string kind, std::string name, double ell, double em, double a)
      : kind_(std::move(kind)), name_(std::move(name)), ell_(ell), em_(em), a_(a) {}

  std::string kind_;
  std::string name_;
  double ell_;
  double em_;
  double a_;
};

using NFunctionPtr = std::shared_ptr<const NFunction>;

// phi(t) = t^{p-2}, Phi(t) = t^p / p, indices ell = em = p, a = p.
class PowerNFunction final : public NFunction {
public:
  explicit PowerNFunction(double p);
  double phi(double t) const override;
  double dphi(double t) const override;
  double Phi(double t) const override;
  double exponent() const { return p_; }

private:
  double p_;
};

// phi(t) = log(1+t)/t with phi(0) = 1, Phi(t) = (1+t)log(1+t) - t.
// ell = 1, em = 2, a = 2.  The conjugate of Phi fails the doubling
// condition, which is what the continuation solver exists for.
class LogNFunction final : public NFunction {
public:
  LogNFunction();
  double phi(double t) const override;
  double dphi(double t) const override;
  double Phi(double t) const override;
};

// N-function defined by user callables; used for bespoke densities in
// tests and for growth-witness functions.  Indices are trusted as given.
class AnalyticNFunction final : public NFunction {
public:
  using Scalar = std::function<double(double)>;
  AnalyticNFunction(std::string name, Scalar phi, Scalar dphi, Scalar Phi,
                    double ell, double em, double a);
  double phi(double t) const override;
  double dphi(double t) const override;
  double Phi(double t) const override;

private:
  Scalar phi_, dphi_, Phi_;
};

// Monotone-cubic interpolant of a two-column (t, phi(t)) table with
// constant extension of phi outside the table range.  Phi is a cached
// cumulative integral of the flux; indices are grid estimates.
class CustomNFunction final : public NFunction {
public:
  CustomNFunction(std::vector<double> t, std::vector<double> phi_values,
                  std::string name = "custom");
  double phi(double t) const override;
  double dphi(double t) const override;
  double Phi(double t) const override;

private:
  double interp(double t, int deriv) const;
  std::vector<double> t_, phi_, slope_;  // PCHIP data
  std::vector<double> cumPhi_;           // Phi at table nodes
  double Phi_head_;                      // Phi(t_front) under constant phi
};

// Phi_eps(t) = Phi(t) + (eps/m) t^m.  Restores a lower growth index
// ell_eps = 1 + (m-1) eps a / (eps a + m) > 1, decreasing to 1 with eps.
class RegularizedNFunction final : public NFunction {
public:
  RegularizedNFunction(NFunctionPtr base, double eps);
  double phi(double t) const override;
  double dphi(double t) const override;
  double Phi(double t) const override;
  double eps() const { return eps_; }
  double ell_eps() const { return ell_; }
  const NFunctionPtr& base() const { return base_; }

private:
  NFunctionPtr base_;
  double eps_;
};

using RegularizedPtr = std::shared_ptr<const RegularizedNFunction>;

// ---- construction and validation -----------------------------------------

// Log-spaced hypothesis/indices grid: 512 points over [1e-6, 1e6].
std::vector<double> default_index_grid();

// Checks the structural hypotheses on a sample grid: flux limits at 0 and
// infinity (slope test), strict flux monotonicity, the index sandwich via
// centered differences, positivity and monotonicity of t^m/Phi, Phi(0)=0
// and midpoint convexity.  Throws HypothesisError naming the failed
// hypothesis ("phi1".."phi4") and the witness t.
void validate_hypotheses(const NFunction& f, std::span<const double> grid);

// Factory for catalog names: "power:p=<float>", "logarithmic",
// "custom:<path to two-column t,phi table>".  Validates on construction.
NFunctionPtr make_nfunction(const std::string& spec);

RegularizedPtr regularize(NFunctionPtr f, double eps);

// (inf, sup) over the grid of 1 + (t phi(t))'/phi(t), centered differences
// with relative step 1e-6.  Grid must be positive, >= 100 points spanning
// at least 6 decades.
std::pair<double, double> growth_indices(const NFunction& f,
                                         std::span<const double> grid);

// ---- conjugation ----------------------------------------------------------

struct ConjugateConfig {
  double s_tol = 1e-12;       // absolute tolerance on the maximizer
  double s_overflow = 1e300;  // bracket cap; beyond it the sup overflows
};

// Young conjugate via the stationarity equation s phi(s) = t, solved by
// bisection after doubling the bracket.  Returns +infinity when the
// maximizer exceeds the representable range (slowly growing flux), and
// throws BracketError if the flux plateaus instead of growing.
double conjugate_eval(const NFunction& f, double t, ConjugateConfig cfg = {});

// ---- norms and comparison functions ---------------------------------------

// Discrete stand-in for a measure space: positive quadrature weights and
// sampled function values.
struct SampledMeasureSpace {
  std::vector<double> weights;
  std::vector<double> values;
  double total_measure() const;
};

// inf{ lambda > 0 : sum_i w_i Phi(|v_i|/lambda) <= 1 }, bisection to
// relative tolerance 1e-10; 0 for the zero function.
double luxemburg_norm(const SampledMeasureSpace& space, const NFunction& f);

// Power-comparison bounds: zeta0 = min(t^ell, t^em), zeta1 = max(...),
// and the Sobolev-conjugate variants with ell* = ell N/(N-ell),
// em* = em N/(N-em).  zeta2/zeta3 require 1 < ell <= em < N.
double zeta0(const NFunction& f, double t);
double zeta1(const NFunction& f, double t);
double zeta2(const NFunction& f, double t, double N);
double zeta3(const NFunction& f, double t, double N);

// sup over the grid of Phi(2t)/Phi(t); <= 2^em when the doubling
// condition holds with the power envelope.
double delta2_sup(const NFunction& f, std::span<const double> grid);

}  // namespace orlicz

#endif
