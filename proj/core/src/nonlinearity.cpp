#include "orlicz/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double tol = rel_tol * std::max(1.0, std::fabs(whole));
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 30);
}

std::vector<double> pchip_slopes(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i)
    delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  d[0] = delta[0];
  d[n - 1] = delta[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
      const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  return d;
}

}  // namespace

// ---- base diagnostics --------------------------------------------------------

double Nonlinearity::g1_constant(std::span<const double> grid) const {
  if (!psi_) throw ConfigError("g1_constant requires a psi witness");
  double c = 0.0;
  for (double t : grid) {
    c = std::max(c, std::fabs(g(t)) / (1.0 + psi_->flux(t)));
    c = std::max(c, std::fabs(g(-t)) / (1.0 + psi_->flux(t)));
  }
  return c;
}

void Nonlinearity::validate_witnesses(double m, double N) const {
  const double one_star = N / (N - 1.0);
  if (psi_) {
    if (!(m < psi_->ell()) || !(psi_->ell() <= psi_->em()) || !(psi_->em() < one_star))
      throw HypothesisError("psi1", psi_->ell(),
                            "(psi1): need m < ell_psi <= m_psi < N/(N-1)");
  }
  if (gamma_) {
    if (!(N < gamma_->ell()) || !(gamma_->ell() <= gamma_->em()) ||
        !std::isfinite(gamma_->em()))
      throw HypothesisError("gamma1", gamma_->ell(),
                            "(gamma1): need N < ell_gamma <= m_gamma < inf");
  }
}

void Nonlinearity::validate_basics(std::span<const double> grid) const {
  if (g(0.0) != 0.0)
    throw HypothesisError("g1", 0.0, "g(x,0) must vanish");
  for (double t : grid)
    if (!std::isfinite(g(t)) || !std::isfinite(G(t)))
      throw HypothesisError("g1", t, "g or G not finite on the sample grid");
}

// ---- PowerNonlinearity -------------------------------------------------------

PowerNonlinearity::PowerNonlinearity(double q)
    : Nonlinearity("power:q=" + std::to_string(q)), q_(q) {
  if (!(q > 1.0)) throw ConfigError("power nonlinearity requires q > 1");
}

double PowerNonlinearity::g(double t) const {
  if (t == 0.0) return 0.0;
  return std::copysign(std::pow(std::fabs(t), q_ - 1.0), t);
}

double PowerNonlinearity::dg(double t) const {
  return (q_ - 1.0) * std::pow(std::fabs(t), q_ - 2.0);
}

double PowerNonlinearity::G(double t) const {
  return std::pow(std::fabs(t), q_) / q_;
}

// ---- PowerLogNonlinearity ------------------------------------------------------

PowerLogNonlinearity::PowerLogNonlinearity(double m)
    : Nonlinearity("powerlog:m=" + std::to_string(m)),
      m_(m),
      closed_form_(std::fabs(m - 2.0) < 1e-12) {
  if (!(m > 1.0)) throw ConfigError("powerlog nonlinearity requires m > 1");
}

double PowerLogNonlinearity::g(double t) const {
  if (t == 0.0) return 0.0;
  const double a = std::fabs(t);
  return std::copysign(std::pow(a, m_ - 1.0) * std::log1p(a), t);
}

double PowerLogNonlinearity::dg(double t) const {
  const double a = std::fabs(t);
  if (a == 0.0) return 0.0;
  return (m_ - 1.0) * std::pow(a, m_ - 2.0) * std::log1p(a) +
         std::pow(a, m_ - 1.0) / (1.0 + a);
}

double PowerLogNonlinearity::G(double t) const {
  const double a = std::fabs(t);
  if (a == 0.0) return 0.0;
  if (closed_form_) {
    if (a < 1e-4) return a * a * a / 3.0 - a * a * a * a / 8.0;  // series
    return 0.5 * (a * a - 1.0) * std::log1p(a) - 0.25 * a * a + 0.5 * a;
  }
  return integrate_adaptive(
      [this](double s) { return std::pow(s, m_ - 1.0) * std::log1p(s); }, 0.0, a,
      1e-12);
}

// ---- CustomNonlinearity --------------------------------------------------------

CustomNonlinearity::CustomNonlinearity(std::vector<double> t, std::vector<double> gv)
    : Nonlinearity("custom"), t_(std::move(t)), g_(std::move(gv)) {
  if (t_.size() != g_.size() || t_.size() < 4)
    throw ConfigError("custom nonlinearity table needs >= 4 rows");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!(t_[i] > 0.0)) throw ConfigError("custom nonlinearity table needs t > 0");
    if (i > 0 && t_[i] <= t_[i - 1])
      throw ConfigError("custom nonlinearity table must have increasing t");
  }
  slope_ = pchip_slopes(t_, g_);
  cumG_.assign(t_.size(), 0.0);
  // linear ramp from g(0)=0 to the first sample
  cumG_[0] = 0.5 * t_.front() * g_.front();
  for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
    const double a = t_[i], b = t_[i + 1];
    const double m = 0.5 * (a + b);
    cumG_[i + 1] = cumG_[i] + (b - a) / 6.0 *
                                  (interp(a, 0) + 4.0 * interp(m, 0) + interp(b, 0));
  }
}

double CustomNonlinearity::interp(double t, int deriv) const {
  if (t <= t_.front()) {
    // odd linear ramp through the origin
    return deriv == 0 ? g_.front() * t / t_.front() : g_.front() / t_.front();
  }
  if (t >= t_.back()) {
    const double s = slope_.back();
    return deriv == 0 ? g_.back() + s * (t - t_.back()) : s;
  }
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  const double y0 = g_[i], y1 = g_[i + 1];
  const double d0 = slope_[i] * h, d1 = slope_[i + 1] * h;
  if (deriv == 0) {
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    return h00 * y0 + h10 * d0 + h01 * y1 + h11 * d1;
  }
  const double g00 = 6 * s * s - 6 * s;
  const double g10 = 3 * s * s - 4 * s + 1;
  const double g01 = -6 * s * s + 6 * s;
  const double g11 = 3 * s * s - 2 * s;
  return (g00 * y0 + g10 * d0 + g01 * y1 + g11 * d1) / h;
}

double CustomNonlinearity::g(double t) const {
  if (t == 0.0) return 0.0;
  return std::copysign(interp(std::fabs(t), 0), t);
}

double CustomNonlinearity::dg(double t) const { return interp(std::fabs(t), 1); }

double CustomNonlinearity::G(double t) const {
  const double a = std::fabs(t);
  if (a == 0.0) return 0.0;
  if (a <= t_.front()) return 0.5 * a * a * g_.front() / t_.front();
  if (a >= t_.back()) {
    const double s = slope_.back();
    const double d = a - t_.back();
    return cumG_.back() + g_.back() * d + 0.5 * s * d * d;
  }
  const auto it = std::upper_bound(t_.begin(), t_.end(), a);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double lo = t_[i], m = 0.5 * (lo + a);
  return cumG_[i] +
         (a - lo) / 6.0 * (interp(lo, 0) + 4.0 * interp(m, 0) + interp(a, 0));
}

// ---- factory --------------------------------------------------------------------

NonlinearityPtr make_nonlinearity(const std::string& spec) {
  NonlinearityPtr nl;
  if (spec.rfind("power:q=", 0) == 0) {
    nl = std::make_shared<const PowerNonlinearity>(std::stod(spec.substr(8)));
  } else if (spec.rfind("powerlog:m=", 0) == 0) {
    nl = std::make_shared<const PowerLogNonlinearity>(std::stod(spec.substr(11)));
  } else if (spec.rfind("custom:", 0) == 0) {
    std::ifstream in(spec.substr(7));
    if (!in) throw ConfigError("cannot open nonlinearity table: " + spec.substr(7));
    std::vector<double> t, v;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ls(line);
      double a, b;
      char sep;
      if (ls >> a) {
        ls >> sep;
        if (sep != ',') ls.putback(sep);
        if (ls >> b) {
          t.push_back(a);
          v.push_back(b);
        }
      }
    }
    nl = std::make_shared<const CustomNonlinearity>(std::move(t), std::move(v));
  } else {
    throw ConfigError("unknown nonlinearity '" + spec +
                      "' (expected power:q=<float>, powerlog:m=<float>, custom:<path>)");
  }
  std::vector<double> grid;
  for (double t = 0.0; t <= 10.0; t += 0.25) grid.push_back(t);
  nl->validate_basics(grid);
  return nl;
}

}  // namespace orlicz
