#ifndef ORLICZ_NONLINEARITY_HPP
#define ORLICZ_NONLINEARITY_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "orlicz/nfunc.hpp"

namespace orlicz {

enum class Variant { Full, Plus, Minus };

// Reaction term g(x,t) with primitive G(x,t) = \int_0^t g(x,s) ds.
// Spatial dependence is restricted to a multiplicative coefficient
// sampled at quadrature points, so G and the defect
// gbar(t) = t g(t) - m G(t) inherit it linearly.
//
// The signed truncations keep g on one sign of t and vanish on the other;
// they drive the signed mountain-pass runs.
class Nonlinearity {
public:
  virtual ~Nonlinearity() = default;

  virtual double g(double t) const = 0;
  virtual double dg(double t) const = 0;
  virtual double G(double t) const = 0;
  const std::string& name() const { return name_; }

  double g_trunc(double t, Variant v) const {
    if (v == Variant::Plus) return t >= 0.0 ? g(t) : 0.0;
    if (v == Variant::Minus) return t <= 0.0 ? g(t) : 0.0;
    return g(t);
  }
  double G_trunc(double t, Variant v) const {
    if (v == Variant::Plus) return t >= 0.0 ? G(t) : 0.0;
    if (v == Variant::Minus) return t <= 0.0 ? G(t) : 0.0;
    return G(t);
  }
  double dg_trunc(double t, Variant v) const {
    if (v == Variant::Plus) return t > 0.0 ? dg(t) : 0.0;
    if (v == Variant::Minus) return t < 0.0 ? dg(t) : 0.0;
    return dg(t);
  }

  // defect t g(t) - m G(t); m comes from the driving N-function
  double gbar(double t, double m) const { return t * g(t) - m * G(t); }

  // multiplicative spatial coefficient (default 1)
  void set_coefficient(std::function<double(double, double)> c) { coeff_ = std::move(c); }
  double coeff_at(double x, double y) const { return coeff_ ? coeff_(x, y) : 1.0; }

  // optional growth witnesses
  void set_psi_witness(NFunctionPtr psi) { psi_ = std::move(psi); }
  void set_gamma_witness(NFunctionPtr gamma) { gamma_ = std::move(gamma); }
  const NFunctionPtr& psi_witness() const { return psi_; }
  const NFunctionPtr& gamma_witness() const { return gamma_; }

  // smallest sampled C with |g(t)| <= C (1 + psi(t)) on the grid;
  // requires a psi witness
  double g1_constant(std::span<const double> grid) const;

  // index windows for the witnesses: m < ell_psi <= m_psi < N/(N-1) and
  // N < ell_gamma <= m_gamma.  Throws HypothesisError ("psi1"/"gamma1").
  void validate_witnesses(double m, double N) const;

  // g(x,0) = 0 and basic sanity on a sample grid
  void validate_basics(std::span<const double> grid) const;

protected:
  explicit Nonlinearity(std::string name) : name_(std::move(name)) {}

private:
  std::string name_;
  std::function<double(double, double)> coeff_;
  NFunctionPtr psi_;
  NFunctionPtr gamma_;
};

using NonlinearityPtr = std::shared_ptr<const Nonlinearity>;

// g(t) = |t|^{q-2} t, G(t) = |t|^q / q.
class PowerNonlinearity final : public Nonlinearity {
public:
  explicit PowerNonlinearity(double q);
  double g(double t) const override;
  double dg(double t) const override;
  double G(double t) const override;
  double exponent() const { return q_; }

private:
  double q_;
};

// g(t) = |t|^{m-2} t log(1+|t|): superlinear but with a primitive growing
// like t^m log t, too slowly for the classical superlinearity condition.
// G is closed-form at m = 2 and adaptive quadrature otherwise.
class PowerLogNonlinearity final : public Nonlinearity {
public:
  explicit PowerLogNonlinearity(double m);
  double g(double t) const override;
  double dg(double t) const override;
  double G(double t) const override;

private:
  double m_;
  bool closed_form_;
};

// Odd extension of a tabulated (t, g(t)) sample, t > 0, monotone cubic
// interpolation, primitive by cached quadrature.
class CustomNonlinearity final : public Nonlinearity {
public:
  CustomNonlinearity(std::vector<double> t, std::vector<double> g_values);
  double g(double t) const override;
  double dg(double t) const override;
  double G(double t) const override;

private:
  std::vector<double> t_, g_, slope_, cumG_;
  double interp(double t, int deriv) const;
};

// "power:q=<float>", "powerlog:m=<float>", "custom:<path>"
NonlinearityPtr make_nonlinearity(const std::string& spec);

}  // namespace orlicz

#endif
