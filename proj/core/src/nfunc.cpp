#include "orlicz/nfunc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "orlicz/parallel.hpp"

namespace orlicz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_witness(const char* msg, double t) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s (witness t = %.9g)", msg, t);
  return buf;
}

}  // namespace

// ---- PowerNFunction --------------------------------------------------------

PowerNFunction::PowerNFunction(double p)
    : NFunction("power", "power:p=" + std::to_string(p), p, p, p), p_(p) {
  // p <= 1 is representable but fails the structural hypotheses; the
  // validator rejects it with the hypothesis named and a witness.
  if (!(p > 0.0) || !std::isfinite(p))
    throw ConfigError("power operator requires a positive finite exponent");
}

double PowerNFunction::phi(double t) const { return std::pow(t, p_ - 2.0); }

double PowerNFunction::dphi(double t) const {
  if (p_ == 2.0) return 0.0;
  return (p_ - 2.0) * std::pow(t, p_ - 3.0);
}

double PowerNFunction::Phi(double t) const {
  return std::pow(std::fabs(t), p_) / p_;
}

// ---- LogNFunction ----------------------------------------------------------

LogNFunction::LogNFunction() : NFunction("logarithmic", "logarithmic", 1.0, 2.0, 2.0) {}

double LogNFunction::phi(double t) const {
  if (t < 1e-8) return 1.0 - t / 2.0 + t * t / 3.0;
  return std::log1p(t) / t;
}

double LogNFunction::dphi(double t) const {
  if (t < 1e-4) return -0.5 + 2.0 * t / 3.0 - 0.75 * t * t;
  return (t / (1.0 + t) - std::log1p(t)) / (t * t);
}

double LogNFunction::Phi(double t) const {
  t = std::fabs(t);
  if (t < 1e-4) {
    // series around 0; the closed form cancels catastrophically there
    return t * t * (0.5 - t / 6.0 + t * t / 12.0);
  }
  return (1.0 + t) * std::log1p(t) - t;
}

// ---- AnalyticNFunction -----------------------------------------------------

AnalyticNFunction::AnalyticNFunction(std::string name, Scalar phi, Scalar dphi,
                                     Scalar Phi, double ell, double em, double a)
    : NFunction("analytic", std::move(name), ell, em, a),
      phi_(std::move(phi)),
      dphi_(std::move(dphi)),
      Phi_(std::move(Phi)) {}

double AnalyticNFunction::phi(double t) const { return phi_(t); }
double AnalyticNFunction::dphi(double t) const { return dphi_(t); }
double AnalyticNFunction::Phi(double t) const { return Phi_(std::fabs(t)); }

// ---- CustomNFunction -------------------------------------------------------

namespace {

// Fritsch-Carlson monotone cubic slopes.
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

CustomNFunction::CustomNFunction(std::vector<double> t, std::vector<double> phiv,
                                 std::string name)
    : NFunction("custom", std::move(name), 1.0, 2.0, 1.0),
      t_(std::move(t)),
      phi_(std::move(phiv)) {
  if (t_.size() != phi_.size() || t_.size() < 4)
    throw ConfigError("custom operator table needs >= 4 (t, phi) rows");
  for (std::size_t i = 0; i < t_.size(); ++i) {
    if (!(t_[i] > 0.0) || !(phi_[i] > 0.0))
      throw ConfigError("custom operator table must have t > 0 and phi > 0");
    if (i > 0 && t_[i] <= t_[i - 1])
      throw ConfigError("custom operator table must have strictly increasing t");
  }
  slope_ = pchip_slopes(t_, phi_);

  // Cumulative Phi at the table nodes: constant density below the table,
  // composite Simpson on the interpolant inside each interval.
  Phi_head_ = phi_.front() * t_.front() * t_.front() / 2.0;
  cumPhi_.assign(t_.size(), 0.0);
  cumPhi_[0] = Phi_head_;
  for (std::size_t i = 0; i + 1 < t_.size(); ++i) {
    const int panels = 16;
    const double h = (t_[i + 1] - t_[i]) / panels;
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) {
      const double a = t_[i] + k * h;
      const double b = a + h;
      const double m = 0.5 * (a + b);
      acc += h / 6.0 *
             (a * interp(a, 0) + 4.0 * m * interp(m, 0) + b * interp(b, 0));
    }
    cumPhi_[i + 1] = cumPhi_[i] + acc;
  }

  // estimate indices over the full grid: the constant-density extensions
  // contribute ratio 2 exactly, which is part of this interpolant's shape
  const auto grid = default_index_grid();
  const auto [lo, hi] = growth_indices(*this, grid);
  ell_ = lo;
  em_ = hi;
  // small-t limit of t^m / Phi(t), with a Richardson consistency probe
  const double ta = 1e-8;
  const double a1 = std::pow(ta, em_) / Phi(ta);
  const double a2 = std::pow(ta / 2.0, em_) / Phi(ta / 2.0);
  a_ = a1;
  if (!(a_ > 0.0) || std::fabs(a1 - a2) > 0.5 * std::fabs(a1))
    throw HypothesisError("phi4", ta,
                          format_witness("custom table: t^m/Phi has no positive small-t limit", ta));
}

double CustomNFunction::interp(double t, int deriv) const {
  if (t <= t_.front()) return deriv == 0 ? phi_.front() : 0.0;
  if (t >= t_.back()) return deriv == 0 ? phi_.back() : 0.0;
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  const double h = t_[i + 1] - t_[i];
  const double s = (t - t_[i]) / h;
  const double y0 = phi_[i], y1 = phi_[i + 1];
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

double CustomNFunction::phi(double t) const { return interp(t, 0); }
double CustomNFunction::dphi(double t) const { return interp(t, 1); }

double CustomNFunction::Phi(double t) const {
  t = std::fabs(t);
  if (t == 0.0) return 0.0;
  if (t <= t_.front()) return phi_.front() * t * t / 2.0;
  if (t >= t_.back())
    return cumPhi_.back() + phi_.back() * (t * t - t_.back() * t_.back()) / 2.0;
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  // Simpson tail from the cached node value
  const double a = t_[i];
  const double m = 0.5 * (a + t);
  return cumPhi_[i] + (t - a) / 6.0 *
                          (a * interp(a, 0) + 4.0 * m * interp(m, 0) + t * interp(t, 0));
}

// ---- RegularizedNFunction --------------------------------------------------

RegularizedNFunction::RegularizedNFunction(NFunctionPtr base, double eps)
    : NFunction("regularized", base->name() + "+eps", 1.0, base->em(), 1.0),
      base_(std::move(base)),
      eps_(eps) {
  if (!(eps > 0.0)) throw ConfigError("regularization requires eps > 0");
  const double m = base_->em();
  const double a = base_->a_const();
  ell_ = 1.0 + (m - 1.0) * eps * a / (eps * a + m);
  a_ = a * m / (m + eps * a);  // small-t limit of t^m / Phi_eps(t)
  char buf[64];
  std::snprintf(buf, sizeof(buf), "+eps=%.6g", eps);
  name_ = base_->name() + buf;
}

double RegularizedNFunction::phi(double t) const {
  return base_->phi(t) + eps_ * std::pow(t, em_ - 2.0);
}

double RegularizedNFunction::dphi(double t) const {
  if (em_ == 2.0) return base_->dphi(t);
  return base_->dphi(t) + eps_ * (em_ - 2.0) * std::pow(t, em_ - 3.0);
}

double RegularizedNFunction::Phi(double t) const {
  t = std::fabs(t);
  return base_->Phi(t) + eps_ / em_ * std::pow(t, em_);
}

RegularizedPtr regularize(NFunctionPtr f, double eps) {
  return std::make_shared<const RegularizedNFunction>(std::move(f), eps);
}

// ---- grids, validation, indices -------------------------------------------

std::vector<double> default_index_grid() {
  std::vector<double> g(512);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = -6.0 + 12.0 * static_cast<double>(i) / (g.size() - 1);
    g[i] = std::pow(10.0, x);
  }
  return g;
}

std::pair<double, double> growth_indices(const NFunction& f,
                                         std::span<const double> grid) {
  if (grid.size() < 100)
    throw std::invalid_argument("growth_indices: grid needs >= 100 points");
  for (double t : grid)
    if (!(t > 0.0)) throw std::invalid_argument("growth_indices: grid must be positive");
  const double decades =
      std::log10(*std::max_element(grid.begin(), grid.end()) /
                 *std::min_element(grid.begin(), grid.end()));
  if (decades < 6.0 - 1e-9)
    throw std::invalid_argument("growth_indices: grid must span >= 6 decades");

  double lo = kInf, hi = -kInf;
  for (double t : grid) {
    const double h = 1e-6 * t;
    const double dflux = (f.flux(t + h) - f.flux(t - h)) / (2.0 * h);
    const double ratio = 1.0 + dflux / f.phi(t);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo, hi};
}

void validate_hypotheses(const NFunction& f, std::span<const double> grid) {
  const std::size_t n = grid.size();
  if (n < 8) throw std::invalid_argument("validate_hypotheses: grid too small");

  // (phi1): flux -> 0 at 0 and -> infinity at infinity, via local
  // log-log slope at the grid ends (a positive slope means a power-law
  // approach to the limit).
  const double s_lo = std::log(f.flux(grid[1]) / f.flux(grid[0])) /
                      std::log(grid[1] / grid[0]);
  if (!(s_lo > 1e-3) || !(f.flux(grid[0]) < f.flux(grid[n / 2])))
    throw HypothesisError("phi1", grid[0],
                          format_witness("(phi1)(i): t*phi(t) does not vanish at 0", grid[0]));
  const double s_hi = std::log(f.flux(grid[n - 1]) / f.flux(grid[n - 2])) /
                      std::log(grid[n - 1] / grid[n - 2]);
  if (!(s_hi > 1e-3) || !(f.flux(grid[n - 1]) > f.flux(grid[n / 2])))
    throw HypothesisError("phi1", grid[n - 1],
                          format_witness("(phi1)(ii): t*phi(t) does not diverge", grid[n - 1]));

  // (phi2): strict flux monotonicity.
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(f.flux(grid[i + 1]) > f.flux(grid[i]) * (1.0 - 1e-14)) ||
        f.flux(grid[i + 1]) <= f.flux(grid[i]))
      throw HypothesisError("phi2", grid[i],
                            format_witness("(phi2): t*phi(t) not strictly increasing", grid[i]));

  // (phi3): centered-difference ratio sandwich against the stored indices.
  const double slack = 1e-6;
  if (!(f.ell() >= 1.0 - 1e-12) || !(f.em() >= f.ell()))
    throw HypothesisError("phi3", 0.0, "(phi3): stored indices must satisfy 1 <= ell <= m");
  for (double t : grid) {
    const double h = 1e-6 * t;
    const double ratio = 1.0 + (f.flux(t + h) - f.flux(t - h)) / (2.0 * h) / f.phi(t);
    if (ratio < f.ell() - slack - 1e-9 * std::fabs(ratio) ||
        ratio > f.em() + slack + 1e-9 * std::fabs(ratio))
      throw HypothesisError("phi3", t,
                            format_witness("(phi3): growth ratio escapes [ell, m]", t));
  }

  // (phi4): positive small-t limit of t^m/Phi and monotone growth of it.
  if (!(f.a_const() > 0.0))
    throw HypothesisError("phi4", 0.0, "(phi4): a = inf t^m/Phi(t) is not positive");
  double prev = -kInf;
  for (double t : grid) {
    const double s = std::pow(t, f.em()) / f.Phi(t);
    if (s < prev * (1.0 - 1e-12))
      throw HypothesisError("phi4", t,
                            format_witness("(phi4): t^m/Phi(t) decreases", t));
    prev = s;
  }

  // N-function basics: Phi(0) = 0 and midpoint convexity.
  if (f.Phi(0.0) != 0.0)
    throw HypothesisError("phi1", 0.0, "Phi(0) must be 0");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    const double lhs = f.Phi(mid);
    const double rhs = 0.5 * (f.Phi(grid[i]) + f.Phi(grid[i + 1]));
    if (lhs > rhs * (1.0 + 1e-12))
      throw HypothesisError("phi2", mid,
                            format_witness("Phi fails midpoint convexity", mid));
  }
}

namespace {

std::vector<std::pair<double, double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open operator table: " + path);
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double t, v;
    char sep;
    if (ls >> t) {
      ls >> sep;
      if (sep != ',') ls.putback(sep);
      if (ls >> v) rows.emplace_back(t, v);
    }
  }
  if (rows.size() < 4) throw ConfigError("operator table too short: " + path);
  return rows;
}

}  // namespace

NFunctionPtr make_nfunction(const std::string& spec) {
  NFunctionPtr f;
  if (spec == "logarithmic") {
    f = std::make_shared<const LogNFunction>();
  } else if (spec.rfind("power:p=", 0) == 0) {
    const double p = std::stod(spec.substr(8));
    f = std::make_shared<const PowerNFunction>(p);
  } else if (spec.rfind("custom:", 0) == 0) {
    auto rows = read_table(spec.substr(7));
    std::vector<double> t, v;
    for (auto& [a, b] : rows) {
      t.push_back(a);
      v.push_back(b);
    }
    f = std::make_shared<const CustomNFunction>(std::move(t), std::move(v));
  } else {
    throw ConfigError("unknown operator '" + spec +
                      "' (expected power:p=<float>, logarithmic, custom:<path>)");
  }
  const auto grid = default_index_grid();
  validate_hypotheses(*f, grid);
  return f;
}

// ---- conjugation -----------------------------------------------------------

double conjugate_eval(const NFunction& f, double t, ConjugateConfig cfg) {
  if (t < 0.0) throw std::domain_error("conjugate_eval: t must be >= 0");
  if (t == 0.0) return 0.0;

  double hi = 1.0;
  while (f.flux(hi) < t) {
    if (hi > cfg.s_overflow) {
      // distinguish "flux grows too slowly for doubles" from a plateau
      if (f.flux(hi) > f.flux(hi / 4.0)) return kInf;
      throw BracketError("conjugate_eval: flux plateaued before reaching t");
    }
    hi *= 2.0;
  }
  double lo = hi > 1.0 ? hi / 2.0 : 0.0;
  while (hi - lo > cfg.s_tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // double resolution exhausted
    (f.flux(mid) < t ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  return std::max(0.0, t * s - f.Phi(s));
}

// ---- Luxemburg norm --------------------------------------------------------

double SampledMeasureSpace::total_measure() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

double luxemburg_norm(const SampledMeasureSpace& space, const NFunction& f) {
  if (space.weights.size() != space.values.size())
    throw std::invalid_argument("luxemburg_norm: weight/value size mismatch");
  double vmax = 0.0;
  for (std::size_t i = 0; i < space.weights.size(); ++i) {
    if (!(space.weights[i] > 0.0))
      throw std::invalid_argument("luxemburg_norm: weights must be positive");
    vmax = std::max(vmax, std::fabs(space.values[i]));
    if (!std::isfinite(space.values[i]))
      throw std::invalid_argument("luxemburg_norm: values must be finite");
  }
  if (vmax == 0.0) return 0.0;

  const auto modular = [&](double lambda) {
    return chunked_sum(space.values.size(), [&](std::size_t i) {
      return space.weights[i] * f.Phi(std::fabs(space.values[i]) / lambda);
    });
  };

  double hi = vmax;
  while (modular(hi) > 1.0) {
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  double lo = hi;
  while (modular(lo) < 1.0) {
    lo /= 2.0;
    if (lo < 1e-300) break;  // modular jumps across 1; return the bracket top
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (modular(mid) <= 1.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---- comparison functions --------------------------------------------------

double zeta0(const NFunction& f, double t) {
  return std::min(std::pow(t, f.ell()), std::pow(t, f.em()));
}

double zeta1(const NFunction& f, double t) {
  return std::max(std::pow(t, f.ell()), std::pow(t, f.em()));
}

namespace {

std::pair<double, double> sobolev_exponents(const NFunction& f, double N) {
  if (!(f.ell() > 1.0) || !(f.em() < N))
    throw std::domain_error("zeta2/zeta3 need 1 < ell <= m < N");
  return {f.ell() * N / (N - f.ell()), f.em() * N / (N - f.em())};
}

}  // namespace

double zeta2(const NFunction& f, double t, double N) {
  auto [ls, ms] = sobolev_exponents(f, N);
  return std::min(std::pow(t, ls), std::pow(t, ms));
}

double zeta3(const NFunction& f, double t, double N) {
  auto [ls, ms] = sobolev_exponents(f, N);
  return std::max(std::pow(t, ls), std::pow(t, ms));
}

double delta2_sup(const NFunction& f, std::span<const double> grid) {
  double sup = 0.0;
  for (double t : grid) sup = std::max(sup, f.Phi(2.0 * t) / f.Phi(t));
  return sup;
}

}  // namespace orlicz
