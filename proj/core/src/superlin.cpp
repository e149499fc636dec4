#include "orlicz/superlin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fem_internal.hpp"

namespace orlicz {

namespace {

using detail::SpMat;
using detail::Vec;

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

const NFunction& base_of(const NFunction& f_eps) {
  if (const auto* reg = dynamic_cast<const RegularizedNFunction*>(&f_eps))
    return *reg->base();
  return f_eps;
}

// default growth witness when the nonlinearity does not carry one
NFunctionPtr default_psi(const Nonlinearity& nl) {
  if (nl.psi_witness()) return nl.psi_witness();
  if (const auto* p = dynamic_cast<const PowerNonlinearity*>(&nl))
    return std::make_shared<const PowerNFunction>(p->exponent());
  if (nl.name().rfind("powerlog:m=", 0) == 0) {
    const double m = std::stod(nl.name().substr(11));
    return std::make_shared<const PowerNFunction>(m + 0.5);
  }
  throw GeometryError("g1", "custom nonlinearity needs an explicit psi witness");
}

double nodal_l2(const Field& a, const Field& b) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void scale_into(Field& dst, const Field& src, double s) {
  for (int i = 0; i < dst.size(); ++i) dst[i] = s * src[i];
}

void project_sign(Field& u, Variant variant, double sign_tol) {
  if (variant == Variant::Full) return;
  bool touched = false;
  for (int i = 0; i < u.size(); ++i) {
    if (variant == Variant::Plus && u[i] < -sign_tol) {
      u[i] = 0.0;
      touched = true;
    } else if (variant == Variant::Minus && u[i] > sign_tol) {
      u[i] = 0.0;
      touched = true;
    }
  }
  (void)touched;
}

struct JContext {
  const NFunction& f_eps;
  const Nonlinearity& nl;
  Variant variant;
  const Mesh& mesh;

  double J(const Field& u) const {
    return energy_superlinear(u, f_eps, nl, variant).total;
  }
  std::vector<double> grad(const Field& u) const {
    return residual_superlinear(u, f_eps, nl, variant);
  }
};

}  // namespace

GeometryCertificate certify_geometry(const NFunction& f_eps, const Nonlinearity& nl,
                                     const Mesh& mesh, const MountainPassConfig& cfg) {
  if (!(f_eps.ell() > 1.0))
    throw HypothesisError("phi3", f_eps.ell(),
                          "mountain pass needs a regularized operator or ell > 1");
  const NFunction& base = base_of(f_eps);
  const double m = f_eps.em();

  // superlinearity beyond t_big: ratios g(t)/t^{m-1} must climb
  {
    double prev = -std::numeric_limits<double>::infinity();
    double first = 0.0, last = 0.0;
    for (int j = 0; j <= 6; ++j) {
      const double t = cfg.t_big * std::pow(2.0, j);
      const double ratio = nl.g(t) / std::pow(t, m - 1.0);
      if (j == 0) first = ratio;
      last = ratio;
      if (ratio < prev)
        throw GeometryError("g3", "superlinearity sampling failed: g(t)/t^{m-1} "
                                  "not increasing beyond t_big");
      prev = ratio;
    }
    if (!(last > first))
      throw GeometryError("g3", "superlinearity sampling failed: no growth in "
                                "g(t)/t^{m-1} (endpoint energy cannot go negative)");
  }

  GeometryCertificate cert{.endpoint = Field(mesh)};
  cert.lambda1 = estimate_lambda1(mesh, base, cfg.lambda_cfg);

  // small-t ratio against the eigenvalue estimate
  {
    double lam = 0.0;
    for (double t : {1e-4, 1e-5, 1e-6})
      lam = std::max(lam, std::fabs(nl.g(t)) / base.flux(t));
    cert.lambda_small = lam;
    if (!(lam < cert.lambda1))
      throw GeometryError("g4", "small-t ratio g(t)/(t phi(t)) is not below the "
                                "estimated first eigenvalue");
  }

  const NFunctionPtr psi = default_psi(nl);
  nl.validate_witnesses(m, std::max(2.0, static_cast<double>(mesh.dim())));

  // fitted constant in the sampled bound G <= (lambda1 - eta) Phi + C Psi
  const double eta = 0.5 * cert.lambda1;
  {
    double c = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double t = std::pow(10.0, -3.0 + 6.0 * i / 200.0);
      const double excess = nl.G(t) - (cert.lambda1 - eta) * base.Phi(t);
      if (excess > 0.0) c = std::max(c, excess / psi->Phi(t));
    }
    cert.growth_C = c;
  }

  // sampled embedding constant |u|_{L_Psi} <= C |grad u|_{L_Phi_eps}
  {
    std::mt19937_64 rng(cfg.seed + 17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double c = 0.0;
    const auto probe = [&](const Field& w) {
      const double num = lphi_norm(w, *psi);
      const double den = w1phi_norm(w, f_eps);
      if (den > 0.0) c = std::max(c, num / den);
    };
    Field b = bump_field(mesh);
    probe(b);
    Field b2 = b;
    for (int i = 0; i < b2.size(); ++i) b2[i] = b[i] * b[i];
    probe(b2);
    for (int k = 0; k < 50; ++k) {
      Field w(mesh);
      for (int i = 0; i < w.size(); ++i)
        if (!mesh.on_boundary(i)) w[i] = gauss(rng);
      probe(w);
    }
    cert.embed_C = c;
  }

  // endpoint: scale the bump until the full functional goes negative
  {
    const Field b = bump_field(mesh);
    Field e(mesh);
    double s = 1.0;
    for (;;) {
      scale_into(e, b, s);
      if (energy_superlinear(e, f_eps, nl, Variant::Full).total < 0.0) break;
      s *= 2.0;
      if (s > cfg.s_max)
        throw GeometryError("g3-endpoint",
                            "no endpoint with negative energy within s_max");
    }
    cert.endpoint = e;
  }

  // rim bound maximized over radii of spheres separating 0 from the endpoint
  {
    const double rho_cap = 0.99 * w1phi_norm(cert.endpoint, f_eps);
    if (!(rho_cap > 1e-4))
      throw GeometryError("geometry", "endpoint sits too close to the origin");
    double best = 0.0, best_rho = 0.0;
    for (int i = 0; i <= 400; ++i) {
      const double rho =
          std::pow(10.0, -4.0 + (std::log10(rho_cap) + 4.0) * i / 400.0);
      const double grad_term =
          eta / cert.lambda1 *
          std::min(std::pow(rho, f_eps.ell()), std::pow(rho, m));
      const double rp = cert.embed_C * rho;
      const double load_term =
          cert.growth_C *
          std::max(std::pow(rp, psi->ell()), std::pow(rp, psi->em()));
      const double val = grad_term - load_term;
      if (val > best) {
        best = val;
        best_rho = rho;
      }
    }
    if (!(best > 0.0))
      throw GeometryError("geometry", "no radius certifies a positive rim level");
    cert.r0 = best;
    cert.rho0 = best_rho;
  }
  return cert;
}

double cerami_metric(const Field& u, const NFunction& f_eps, const Nonlinearity& nl,
                     Variant variant, const DualNorm& dual) {
  const double rn = dual(residual_superlinear(u, f_eps, nl, variant));
  return (1.0 + w1phi_norm(u, f_eps)) * rn;
}

namespace {

// Newton polish on J'(u) = 0 near a nondegenerate saddle.  Returns true and
// overwrites `u` only when the polished field keeps the level above the rim
// and meets the residual target; otherwise the caller continues deforming.
bool newton_polish(const JContext& ctx, const DualNorm& dual, Field& u, double r0,
                   const MountainPassConfig& cfg) {
  Field w = u;
  const Mesh& mesh = ctx.mesh;
  double rn = dual(ctx.grad(w));
  for (int it = 0; it < 50; ++it) {
    if (rn <= cfg.tol) break;
    SpMat h = detail::assemble_gradient_hessian(w, ctx.f_eps, cfg.tau_rel);
    std::vector<double> c(mesh.num_elements());
    for (int e = 0; e < mesh.num_elements(); ++e) {
      const double coeff = ctx.nl.coeff_at(
          mesh.centroid(e, 0), mesh.dim() == 2 ? mesh.centroid(e, 1) : 0.0);
      c[e] = coeff * ctx.nl.dg_trunc(w.value_at_quadrature(e), ctx.variant);
    }
    h -= detail::assemble_weighted_mass(mesh, c);
    Eigen::SparseLU<SpMat> lu(h);
    if (lu.info() != Eigen::Success) return false;
    const Vec r = detail::to_vec(ctx.grad(w));
    Vec delta = lu.solve(-r);
    if (!delta.allFinite()) return false;

    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 20; ++bt) {
      Field trial = w;
      detail::add_free_increment(trial, delta, step);
      project_sign(trial, ctx.variant, cfg.sign_tol);
      const double rt = dual(ctx.grad(trial));
      if (rt < rn) {
        w = trial;
        rn = rt;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return false;
  }
  if (rn > cfg.tol) return false;
  if (ctx.J(w) < r0 - cfg.slack) return false;  // wandered toward the trivial well
  if (ctx.variant == Variant::Plus) {
    for (int i = 0; i < w.size(); ++i)
      if (w[i] < -cfg.sign_tol) return false;
  } else if (ctx.variant == Variant::Minus) {
    for (int i = 0; i < w.size(); ++i)
      if (w[i] > cfg.sign_tol) return false;
  }
  u = w;
  return true;
}

void retension_path(std::vector<Field>& path) {
  const std::size_t k = path.size() - 1;
  std::vector<double> cum(path.size(), 0.0);
  for (std::size_t j = 0; j < k; ++j)
    cum[j + 1] = cum[j] + nodal_l2(path[j + 1], path[j]);
  if (cum[k] <= 0.0) return;
  std::vector<Field> fresh;
  fresh.reserve(path.size());
  fresh.push_back(path.front());
  std::size_t seg = 0;
  for (std::size_t j = 1; j < k; ++j) {
    const double target = cum[k] * static_cast<double>(j) / static_cast<double>(k);
    while (seg + 1 < k && cum[seg + 1] < target) ++seg;
    const double den = cum[seg + 1] - cum[seg];
    const double theta = den > 0.0 ? (target - cum[seg]) / den : 0.0;
    Field p = path[seg];
    for (int i = 0; i < p.size(); ++i)
      p[i] = (1.0 - theta) * path[seg][i] + theta * path[seg + 1][i];
    fresh.push_back(std::move(p));
  }
  fresh.push_back(path.back());
  path = std::move(fresh);
}

}  // namespace

std::pair<Field, SolveReport> mountain_pass_solve(const NFunction& f_eps,
                                                  const Nonlinearity& nl, Variant variant,
                                                  const Mesh& mesh,
                                                  const MountainPassConfig& cfg) {
  GeometryCertificate cert = certify_geometry(f_eps, nl, mesh, cfg);
  SolveReport report;
  report.oracle_mode = mesh.dim() == 1;
  report.r0 = cert.r0;

  const JContext ctx{f_eps, nl, variant, mesh};
  const DualNorm dual(mesh);
  Eigen::SimplicialLDLT<SpMat> riesz(detail::assemble_poisson(mesh));
  if (riesz.info() != Eigen::Success)
    throw std::runtime_error("mountain_pass_solve: Poisson factorization failed");

  // path from 0 to the endpoint; the minus variant mirrors it
  Field endpoint = cert.endpoint;
  if (variant == Variant::Minus)
    for (int i = 0; i < endpoint.size(); ++i) endpoint[i] = -endpoint[i];

  const int k = std::max(4, cfg.path_points);
  std::vector<Field> path;
  path.reserve(k + 1);
  for (int j = 0; j <= k; ++j) {
    Field p(mesh);
    scale_into(p, endpoint, static_cast<double>(j) / k);
    path.push_back(std::move(p));
  }

  Field climber(mesh);
  double level = 0.0, rn = std::numeric_limits<double>::infinity();
  double best_rn = rn;
  Field best = climber;
  std::vector<double> level_window;

  for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    int kmax = 0;
    level = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= k; ++j) {
      const double val = ctx.J(path[j]);
      if (val > level) {
        level = val;
        kmax = j;
      }
    }
    climber = path[kmax];
    rn = dual(ctx.grad(climber));
    report.energy_history.push_back(level);
    report.residual_history.push_back(rn);
    report.cerami_history.push_back((1.0 + w1phi_norm(climber, f_eps)) * rn);
    report.iterations = sweep;
    if (rn < best_rn) {
      best_rn = rn;
      best = climber;
    }

    if (rn <= cfg.tol) {
      report.converged = true;
      break;
    }
    if (sweep >= cfg.min_sweeps && rn <= cfg.polish_threshold) {
      Field candidate = climber;
      if (newton_polish(ctx, dual, candidate, cert.r0, cfg)) {
        climber = candidate;
        rn = dual(ctx.grad(climber));
        level = ctx.J(climber);
        report.energy_history.push_back(level);
        report.residual_history.push_back(rn);
        report.cerami_history.push_back((1.0 + w1phi_norm(climber, f_eps)) * rn);
        report.converged = true;
        break;
      }
    }

    // relax the maximal point (interior only) along the lifted gradient
    if (kmax > 0 && kmax < k) {
      const Vec r = detail::to_vec(ctx.grad(path[kmax]));
      const Vec dir = -riesz.solve(r);
      const double slope = r.dot(dir);
      double step = 1.0;
      for (int bt = 0; bt < 30; ++bt) {
        Field trial = path[kmax];
        detail::add_free_increment(trial, dir, step);
        project_sign(trial, variant, cfg.sign_tol);
        if (ctx.J(trial) <= level + cfg.armijo_slope * step * slope) {
          path[kmax] = trial;
          break;
        }
        step *= 0.5;
      }
    } else if (kmax == k) {
      // the maximum moved to the endpoint; stretch the path further out
      Field farther(mesh);
      for (int i = 0; i < farther.size(); ++i) farther[i] = 2.0 * path[k][i];
      if (ctx.J(farther) < 0.0) path[k] = farther;
    }
    retension_path(path);

    level_window.push_back(level);
    if (static_cast<int>(level_window.size()) > cfg.stall_window) {
      const auto first = level_window.end() - cfg.stall_window;
      const double drop = *std::max_element(first, level_window.end()) -
                          *std::min_element(first, level_window.end());
      if (drop < cfg.stall) {
        report.failure = "stalled level";
        throw NonconvergenceError(
            "mountain pass stalled: level stopped moving while the residual "
            "stayed above tolerance",
            std::vector<double>(best.nodal().begin(), best.nodal().end()), best_rn);
      }
    }
  }

  if (!report.converged) {
    report.failure = "sweep budget exhausted";
    throw NonconvergenceError("mountain pass did not converge within max_sweeps",
                              std::vector<double>(best.nodal().begin(),
                                                  best.nodal().end()),
                              best_rn);
  }

  report.level = ctx.J(climber);
  report.final_residual = rn;
  return {std::move(climber), std::move(report)};
}

}  // namespace orlicz
