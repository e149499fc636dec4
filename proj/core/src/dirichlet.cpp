#include "orlicz/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fem_internal.hpp"
#include "orlicz/parallel.hpp"

namespace orlicz {

namespace {

using detail::SpMat;
using detail::Vec;

constexpr double kGoldenInv = 0.6180339887498949;

struct Riesz {
  explicit Riesz(const Mesh& mesh) {
    solver.compute(detail::assemble_poisson(mesh));
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("Riesz: Poisson factorization failed");
  }
  Vec solve(const Vec& r) const { return solver.solve(r); }
  double dual_norm(const Vec& r) const {
    const double v = r.dot(solver.solve(r));
    return v > 0.0 ? std::sqrt(v) : 0.0;
  }
  Eigen::SimplicialLDLT<SpMat> solver;
};

double bound_entry_max(const BoundMonitorEntry& e) {
  return std::max(e.phi_integral, std::max(e.flux_integral, e.w11));
}

// Core damped-Newton loop on I(u) = \int Phi(|grad u|) - f u.  The growth
// regime checks live in the public wrappers; on a fixed mesh the discrete
// functional is smooth and strictly convex whenever the flux is strictly
// increasing, so the loop itself has no index restriction.
Field newton_minimize(const Mesh& mesh, const NFunction& f_op, const SourceTerm& f,
                      const SolverConfig& cfg, const Field* initial, const Riesz& riesz,
                      SolveReport& report) {
  Field u(mesh);
  if (initial) {
    if (&initial->mesh() != &mesh)
      throw MeshMismatchError("initial guess lives on a different mesh");
    u = *initial;
    u.enforce_dirichlet();
  } else {
    // Riesz lift of the load: the Poisson solution is a serviceable start
    Field zero(mesh);
    const Vec b = -detail::to_vec(residual_linear(zero, f_op, f));
    detail::add_free_increment(u, riesz.solve(b), 1.0);
  }

  double energy = energy_linear(u, f_op, f).total;
  Field best = u;
  double best_res = std::numeric_limits<double>::infinity();

  for (int it = 0; it < cfg.max_iters; ++it) {
    const auto r_std = residual_linear(u, f_op, f);
    const Vec r = detail::to_vec(r_std);
    const double rnorm = riesz.dual_norm(r);
    report.energy_history.push_back(energy);
    report.residual_history.push_back(rnorm);
    report.iterations = it;
    if (rnorm < best_res) {
      best_res = rnorm;
      best = u;
    }
    if (rnorm <= cfg.tol) {
      report.converged = true;
      report.final_residual = rnorm;
      return u;
    }

    // Newton direction, falling back to the preconditioned gradient when
    // the factorization fails or the direction is not a descent direction.
    Vec dir;
    bool have_newton = false;
    {
      SpMat h = detail::assemble_gradient_hessian(u, f_op, cfg.tau_rel);
      Eigen::SimplicialLDLT<SpMat> ldlt(h);
      if (ldlt.info() == Eigen::Success) {
        dir = -ldlt.solve(r);
        if (dir.allFinite() && r.dot(dir) < 0.0) have_newton = true;
      }
    }
    // Once the residual is small the energy decrease per step drops below
    // double rounding; switch the acceptance test to residual decrease.
    const bool residual_phase = rnorm <= 1e-6 * (1.0 + std::fabs(energy));
    for (int attempt = 0; attempt < 2; ++attempt) {
      if (!have_newton) dir = -riesz.solve(r);
      const double slope = r.dot(dir);
      double step = 1.0;
      bool accepted = false;
      for (int bt = 0; bt < cfg.max_backtracks; ++bt) {
        Field trial = u;
        detail::add_free_increment(trial, dir, step);
        const double etrial = energy_linear(trial, f_op, f).total;
        const bool ok =
            residual_phase
                ? (riesz.dual_norm(detail::to_vec(residual_linear(trial, f_op, f))) <
                       rnorm &&
                   etrial <= energy + 1e-12 * (1.0 + std::fabs(energy)))
                : etrial <= energy + cfg.armijo_slope * step * slope;
        if (ok) {
          u = trial;
          energy = std::min(energy, etrial);
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (accepted) break;
      if (!have_newton) {
        report.failure = "stalled line search";
        throw NonconvergenceError("line search stalled before reaching tolerance",
                                  std::vector<double>(best.nodal().begin(),
                                                      best.nodal().end()),
                                  best_res);
      }
      have_newton = false;  // retry once along the gradient
    }
  }

  report.failure = "iteration budget exhausted";
  throw NonconvergenceError("no convergence within max_iters",
                            std::vector<double>(best.nodal().begin(), best.nodal().end()),
                            best_res);
}

Field bump_field(const Mesh& mesh) {
  Field u(mesh);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    if (mesh.on_boundary(i)) continue;
    double v = std::sin(pi * mesh.coord(i, 0));
    if (mesh.dim() == 2) v *= std::sin(pi * mesh.coord(i, 1));
    u[i] = v;
  }
  return u;
}

}  // namespace

double BoundMonitorEntry::max_entry() const { return bound_entry_max(*this); }

ContinuationSchedule ContinuationSchedule::geometric(int steps) {
  ContinuationSchedule s;
  for (int k = 0; k <= steps; ++k) s.eps_values.push_back(std::pow(2.0, -k));
  return s;
}

void ContinuationSchedule::validate() const {
  if (eps_values.size() < 2) throw ConfigError("continuation ladder needs >= 2 steps");
  for (std::size_t i = 0; i < eps_values.size(); ++i) {
    if (!(eps_values[i] > 0.0)) throw ConfigError("continuation ladder must be positive");
    if (i > 0 && !(eps_values[i] < eps_values[i - 1]))
      throw ConfigError("continuation ladder must be strictly decreasing");
  }
  if (!(eps_values.back() <= eps_values.front() / 100.0))
    throw ConfigError("continuation ladder must descend at least two orders");
}

std::pair<Field, SolveReport> solve_reflexive(const Mesh& mesh, const NFunction& f_op,
                                              const SourceTerm& f, const SolverConfig& cfg,
                                              const Field* initial) {
  if (!(cfg.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (!(f_op.ell() > 1.0))
    throw HypothesisError("phi3", f_op.ell(),
                          "minimization needs a lower growth index above 1; "
                          "regularize the operator first");
  SolveReport report;
  report.oracle_mode = mesh.dim() == 1;
  Riesz riesz(mesh);
  Field u = newton_minimize(mesh, f_op, f, cfg, initial, riesz, report);
  return {std::move(u), std::move(report)};
}

std::pair<Field, SolveReport> solve_continuation(const Mesh& mesh, const NFunction& f_op,
                                                 const SourceTerm& f,
                                                 const ContinuationSchedule& schedule,
                                                 const SolverConfig& cfg,
                                                 const Field* initial) {
  schedule.validate();
  SolveReport report;
  report.oracle_mode = mesh.dim() == 1;
  Riesz riesz(mesh);

  // non-owning handle for building the regularized operators
  NFunctionPtr base(NFunctionPtr{}, &f_op);

  std::vector<Field> ladder_fields;
  Field u(mesh);
  bool have_u = false;

  for (double eps : schedule.eps_values) {
    const RegularizedNFunction f_eps(base, eps);
    SolveReport inner;
    const Field* start = (have_u && schedule.warm_start) ? &u : initial;
    Field next = newton_minimize(mesh, f_eps, f, cfg, start, riesz, inner);

    BoundMonitorEntry bm;
    bm.eps = eps;
    const auto mag = gradient_magnitudes(next);
    bm.phi_integral = chunked_sum(mag.size(), [&](std::size_t e) {
      return mesh.weight(static_cast<int>(e)) * f_op.Phi(mag[e]);
    });
    bm.flux_integral = chunked_sum(mag.size(), [&](std::size_t e) {
      return mesh.weight(static_cast<int>(e)) * f_op.flux(mag[e]) * mag[e];
    });
    bm.w11 = chunked_sum(mag.size(), [&](std::size_t e) {
      return mesh.weight(static_cast<int>(e)) * mag[e];
    });
    report.bound_monitor.push_back(bm);
    report.eps_schedule.push_back(eps);
    report.bound_R = std::max(report.bound_R, bm.max_entry());
    if (bm.max_entry() > cfg.R_cap)
      throw BoundViolationError("a-priori bound monitor exceeded R_cap", eps,
                                bm.max_entry());

    const EnergyValue ev = energy_linear(next, f_eps, f);
    report.eps_energy_history.push_back(ev.total);
    report.eps_dirichlet_history.push_back(ev.dirichlet_part);

    if (have_u) {
      Field diff = field_difference(next, u);
      report.increment_history.push_back(w1phi_norm(diff, f_op));
      report.w11_increment_history.push_back(w11_seminorm(diff));
    }
    u = next;
    have_u = true;
    ladder_fields.push_back(u);
    report.iterations += inner.iterations + 1;
  }

  // Final polish of the unregularized problem.  The discrete functional is
  // still smooth and strictly convex on a fixed mesh, so Newton from the
  // last ladder iterate drives the true weak-form residual below tol_final.
  {
    SolverConfig polish = cfg;
    polish.tol = cfg.tol_final;
    SolveReport inner;
    u = newton_minimize(mesh, f_op, f, polish, &u, riesz, inner);
    report.energy_history = inner.energy_history;
    report.residual_history = inner.residual_history;
    report.iterations += inner.iterations;
    Field diff = field_difference(u, ladder_fields.back());
    report.increment_history.push_back(w1phi_norm(diff, f_op));
    report.w11_increment_history.push_back(w11_seminorm(diff));
  }

  report.final_residual = riesz.dual_norm(detail::to_vec(residual_linear(u, f_op, f)));
  report.converged = report.final_residual <= cfg.tol_final;

  // pairing of the unregularized operator at u_eps against u_eps - u_final
  for (const Field& ue : ladder_fields) {
    Field diff = field_difference(ue, u);
    const auto gu = gradient_field(ue);
    const auto gd = gradient_field(diff);
    const int d = mesh.dim();
    double pairing = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      double gm = 0.0;
      for (int ax = 0; ax < d; ++ax) gm += gu[e * d + ax] * gu[e * d + ax];
      gm = std::sqrt(gm);
      if (gm == 0.0) continue;
      const double coef = f_op.phi(gm);
      double dot = 0.0;
      for (int ax = 0; ax < d; ++ax) dot += gu[e * d + ax] * gd[e * d + ax];
      pairing += mesh.weight(e) * coef * dot;
    }
    report.pairing_history.push_back(pairing);
  }

  return {std::move(u), std::move(report)};
}

double monotonicity_gap(const Field& u, const Field& v, const NFunction& f_op) {
  if (&u.mesh() != &v.mesh())
    throw MeshMismatchError("monotonicity_gap: fields on different meshes");
  const Mesh& mesh = u.mesh();
  const int d = mesh.dim();
  const auto gu = gradient_field(u);
  const auto gv = gradient_field(v);
  double total = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    double mu = 0.0, mv = 0.0;
    for (int ax = 0; ax < d; ++ax) {
      mu += gu[e * d + ax] * gu[e * d + ax];
      mv += gv[e * d + ax] * gv[e * d + ax];
    }
    mu = std::sqrt(mu);
    mv = std::sqrt(mv);
    const double cu = mu > 0.0 ? f_op.phi(mu) : 0.0;
    const double cv = mv > 0.0 ? f_op.phi(mv) : 0.0;
    double dot = 0.0;
    for (int ax = 0; ax < d; ++ax) {
      const double fu = cu * gu[e * d + ax];
      const double fv = cv * gv[e * d + ax];
      dot += (fu - fv) * (gu[e * d + ax] - gv[e * d + ax]);
    }
    total += mesh.weight(e) * dot;
  }
  return total;
}

double estimate_lambda1(const Mesh& mesh, const NFunction& f_op, const SolverConfig& cfg,
                        bool* converged) {
  Riesz riesz(mesh);

  const auto rayleigh = [&](const Field& w) {
    const auto mag = gradient_magnitudes(w);
    double num = 0.0, den = 0.0;
    for (int e = 0; e < mesh.num_elements(); ++e) {
      num += mesh.weight(e) * f_op.Phi(mag[e]);
      den += mesh.weight(e) * f_op.Phi(w.value_at_quadrature(e));
    }
    return num / den;
  };
  const auto normalize = [&](Field& w) {
    const double n = lphi_norm(w, f_op);
    if (n > 0.0)
      for (int i = 0; i < w.size(); ++i) w[i] /= n;
  };
  // multiplicative scale sweep; a no-op for homogeneous densities
  const auto scale_search = [&](Field& w, double& q) {
    double lo = -1.5, hi = 1.5;  // log2 scale window
    for (int k = 0; k < 24; ++k) {
      const double m1 = hi - kGoldenInv * (hi - lo);
      const double m2 = lo + kGoldenInv * (hi - lo);
      Field w1 = w, w2 = w;
      for (int i = 0; i < w.size(); ++i) {
        w1[i] *= std::exp2(m1);
        w2[i] *= std::exp2(m2);
      }
      if (rayleigh(w1) < rayleigh(w2))
        hi = m2;
      else
        lo = m1;
    }
    const double s = std::exp2(0.5 * (lo + hi));
    Field trial = w;
    for (int i = 0; i < w.size(); ++i) trial[i] *= s;
    const double qt = rayleigh(trial);
    if (qt < q) {
      w = trial;
      q = qt;
    }
  };

  Field u = bump_field(mesh);
  normalize(u);
  double q = rayleigh(u);
  double best = q;
  const SourceTerm zero(0.0);
  int flat_iters = 0;
  bool ok = false;

  for (int it = 0; it < cfg.max_iters; ++it) {
    // gradient of the quotient: (A'(u) - q B'(u)) / B(u)
    const auto ga = residual_linear(u, f_op, zero);
    std::vector<double> gq(ga.size(), 0.0);
    double bval = 0.0;
    {
      const int nv = mesh.verts_per_element();
      std::vector<double> gb(ga.size(), 0.0);
      for (int e = 0; e < mesh.num_elements(); ++e) {
        const double uv = u.value_at_quadrature(e);
        bval += mesh.weight(e) * f_op.Phi(uv);
        const double fl = std::copysign(f_op.flux(std::fabs(uv)), uv);
        for (int l = 0; l < nv; ++l) {
          const int fi = mesh.free_index(mesh.vertex(e, l));
          if (fi >= 0) gb[fi] += mesh.weight(e) * fl / nv;
        }
      }
      for (std::size_t i = 0; i < gq.size(); ++i) gq[i] = (ga[i] - q * gb[i]) / bval;
    }

    const Vec dir = -riesz.solve(detail::to_vec(gq));
    double step = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 40; ++bt) {
      Field trial = u;
      detail::add_free_increment(trial, dir, step);
      normalize(trial);
      const double qt = rayleigh(trial);
      if (qt < q - 1e-14 * std::fabs(q)) {
        u = trial;
        q = qt;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (it % 3 == 0) scale_search(u, q);
    if (q < best) best = q;

    if (!improved) {
      if (++flat_iters >= 3) {
        ok = true;
        break;
      }
    } else {
      flat_iters = 0;
    }
  }

  if (converged) *converged = ok;
  return best;
}

SPlusVerdict s_plus_diagnostic(const SolveReport& report, double pairing_tol) {
  SPlusVerdict v;
  const auto& p = report.pairing_history;
  const std::size_t tail = std::min<std::size_t>(3, p.size());
  v.max_tail_pairing = 0.0;
  for (std::size_t i = p.size() - tail; i < p.size(); ++i)
    v.max_tail_pairing = std::max(v.max_tail_pairing, std::fabs(p[i]));
  v.pairing_ok = v.max_tail_pairing <= pairing_tol;
  if (!v.pairing_ok)
    for (std::size_t i = p.size() - tail; i < p.size(); ++i)
      if (std::fabs(p[i]) > pairing_tol) v.offending_entries.push_back(static_cast<int>(i));

  const auto& inc = report.increment_history;
  v.increments_ok = true;
  const std::size_t itail = std::min<std::size_t>(4, inc.size());
  for (std::size_t i = inc.size() - itail; i + 1 < inc.size(); ++i)
    if (!(inc[i + 1] <= inc[i] * 1.05 + 1e-15)) {
      v.increments_ok = false;
      v.offending_entries.push_back(static_cast<int>(i + 1));
    }

  v.pass = v.pairing_ok && v.increments_ok;
  return v;
}

}  // namespace orlicz
