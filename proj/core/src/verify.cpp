#include "orlicz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace orlicz {

void MoserParams::validate() const {
  if (!(m < N))
    throw ConfigError("moser ladder: needs m < N (chi undefined otherwise)");
  if (!(q > N / m))
    throw ConfigError("moser ladder: needs q > N/m (beta undefined otherwise)");
  if (!(k > 0.0)) throw ConfigError("moser ladder: truncation level k must be > 0");
  if (!(0.0 < r2 && r2 < r1)) throw ConfigError("moser ladder: need 0 < r2 < r1");
  if (n0 < 0 || n_max < n0) throw ConfigError("moser ladder: bad ladder indices");
}

namespace {

// || ubar ||_{L^p(set)} with p up to ~1e5: evaluate through logs
double level_norm(const std::vector<double>& w, const std::vector<double>& v, double p) {
  double amax = -std::numeric_limits<double>::infinity();
  std::vector<double> a(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    a[i] = std::log(w[i]) + p * std::log(v[i]);
    amax = std::max(amax, a[i]);
  }
  double s = 0.0;
  for (double ai : a) s += std::exp(ai - amax);
  return std::exp((amax + std::log(s)) / p);
}

double shaped_bound(const MoserParams& p, double fq, double level_n0) {
  const double rho = std::pow(fq, p.beta()) / std::pow(p.k, p.beta() * (p.m - 1.0));
  const double bracket = *p.frozen_C / (p.r1 - p.r2) * (1.0 + rho);
  return std::pow(bracket, 1.0 / (p.chi() - 1.0)) * level_n0;
}

}  // namespace

NormLadder moser_ladder(const Field& u, const SourceTerm& f, const MoserParams& params) {
  params.validate();
  const Mesh& mesh = u.mesh();
  NormLadder out;
  out.fnorm_q = f.lq_norm_on(mesh, params.q);

  for (int n = 0; n <= params.n_max; ++n) {
    const double rn = params.r2 + (params.r1 - params.r2) / std::pow(2.0, n);
    const double p = params.m * std::pow(params.chi(), n);
    std::vector<double> w, v;
    double measure = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      if (mesh.interior_distance(e) <= rn) continue;
      w.push_back(mesh.weight(e));
      v.push_back(std::max(u.value_at_quadrature(e), params.k));
      measure += mesh.weight(e);
    }
    if (w.empty())
      throw ConfigError("moser ladder: radii select no interior elements; "
                        "refine the mesh or shrink r1");
    const double lvl = level_norm(w, v, p);
    if (!std::isfinite(lvl))
      throw ConfigError("moser ladder: non-finite level encountered");
    out.radii.push_back(rn);
    out.exponents.push_back(p);
    out.measures.push_back(measure);
    out.levels.push_back(lvl);
  }

  // extrapolate the flat-field normalization away to estimate the sup
  out.sup_estimate =
      out.levels.back() / std::pow(out.measures.back(), 1.0 / out.exponents.back());

  if (params.frozen_C) {
    out.bound_bracket = shaped_bound(params, out.fnorm_q, 1.0);
    out.bound_value = out.bound_bracket * out.levels[params.n0];
    out.bound_ok = out.sup_estimate <= out.bound_value * (1.0 + 1e-12);
  }
  return out;
}

double fit_moser_constant(const Field& u, const SourceTerm& f, MoserParams params) {
  params.frozen_C.reset();
  const NormLadder ladder = moser_ladder(u, f, params);
  const double rho = std::pow(ladder.fnorm_q, params.beta()) /
                     std::pow(params.k, params.beta() * (params.m - 1.0));
  const double ratio = ladder.sup_estimate / ladder.levels[params.n0];
  return (params.r1 - params.r2) * std::pow(ratio, params.chi() - 1.0) / (1.0 + rho);
}

PoincareReport poincare_check(std::span<const Field> fields, const NFunction& f_op,
                              double lambda1_est) {
  PoincareReport rep;
  rep.lambda1_est = lambda1_est;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const Field& u = fields[i];
    rep.diam = u.mesh().diameter();
    ++rep.checked;
    const double nu = lphi_norm(u, f_op);
    const double ng = w1phi_norm(u, f_op);
    if (nu == 0.0 && ng == 0.0) continue;  // zero field: 0 <= 0
    const double cap = 2.0 * rep.diam * ng;
    rep.max_norm_ratio = std::max(rep.max_norm_ratio, cap > 0.0 ? nu / cap : 0.0);
    if (nu > cap * (1.0 + 1e-10)) rep.norm_violations.push_back(static_cast<int>(i));

    const Mesh& mesh = u.mesh();
    const auto mag = gradient_magnitudes(u);
    double phi_u = 0.0, phi_g = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      phi_u += mesh.weight(e) * f_op.Phi(u.value_at_quadrature(e));
      phi_g += mesh.weight(e) * f_op.Phi(mag[e]);
    }
    if (lambda1_est * phi_u > phi_g * (1.0 + 1e-10))
      rep.lambda_violations.push_back(static_cast<int>(i));
  }
  return rep;
}

RateTable convergence_study(const ConvergenceProblem& problem,
                            std::span<const int> mesh_ladder, const SolverConfig& cfg) {
  if (!problem.exact)
    throw ConfigError("convergence study: no closed-form oracle for '" +
                      problem.name + "'");
  const NFunctionPtr f_op = make_nfunction(problem.operator_spec);
  const SourceTerm f(problem.f_const);

  RateTable table;
  for (int cells : mesh_ladder) {
    const Mesh mesh = Mesh::interval(cells);
    Field u(mesh);
    if (f_op->ell() > 1.0) {
      u = solve_reflexive(mesh, *f_op, f, cfg).first;
    } else {
      u = solve_continuation(mesh, *f_op, f, ContinuationSchedule::geometric(), cfg).first;
    }

    // interpolant of the oracle, for the gradient error
    std::vector<double> exact_nodal(mesh.num_nodes());
    for (int i = 0; i < mesh.num_nodes(); ++i)
      exact_nodal[i] = problem.exact(mesh.coord(i, 0));
    const Field exact_field(mesh, std::move(exact_nodal), false);

    RateRow row;
    row.cells = cells;
    row.h = 1.0 / cells;
    for (int i = 0; i < mesh.num_nodes(); ++i)
      row.err_linf = std::max(row.err_linf,
                              std::fabs(u[i] - problem.exact(mesh.coord(i, 0))));
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const double xm = mesh.centroid(e, 0);
      row.err_linf = std::max(row.err_linf,
                              std::fabs(u.value_at_quadrature(e) - problem.exact(xm)));
    }
    Field err(mesh, std::vector<double>(u.nodal().begin(), u.nodal().end()), false);
    for (int i = 0; i < mesh.num_nodes(); ++i) err[i] -= exact_field[i];
    row.err_w1phi = w1phi_norm(err, *f_op);
    table.rows.push_back(row);
  }

  // least-squares slope of log(err) against log(h)
  const auto fit_rate = [&](auto pick) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(table.rows.size());
    for (const auto& r : table.rows) {
      const double x = std::log(r.h), y = std::log(pick(r));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  table.rate_linf = fit_rate([](const RateRow& r) { return r.err_linf; });
  table.rate_w1phi = fit_rate([](const RateRow& r) { return r.err_w1phi; });
  return table;
}

}  // namespace orlicz
