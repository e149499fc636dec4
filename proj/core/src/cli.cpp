#include "orlicz/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "orlicz/config.hpp"
#include "orlicz/dirichlet.hpp"
#include "orlicz/report.hpp"
#include "orlicz/superlin.hpp"
#include "orlicz/verify.hpp"

namespace orlicz {

namespace {

const char* kUsage =
    "usage: orlicz-solver <subcommand> [flags]\n"
    "\n"
    "subcommands:\n"
    "  solve-linear        solve -div(phi(|grad u|) grad u) = f, u = 0 on the boundary\n"
    "  solve-superlinear   mountain-pass run for -div(phi_eps(|grad u|) grad u) = g(x,u)\n"
    "  verify              post-hoc harnesses: --task poincare | moser | convergence\n"
    "  catalog             list operators and nonlinearities\n"
    "\n"
    "flags (override config-file keys):\n"
    "  --config <file>         INI-style key=value run config\n"
    "  --operator <spec>       power:p=<float> | logarithmic | custom:<path>\n"
    "  --nonlinearity <spec>   power:q=<float> | powerlog:m=<float> | custom:<path>\n"
    "  --mesh <spec>           1d:<n> | 2d:<n> | 2d:<nx>x<ny>\n"
    "  --f <spec>              const:<v> | file:<path>\n"
    "  --schedule <spec>       geometric:<k> | comma list of eps values\n"
    "  --variant <v>           full | plus | minus\n"
    "  --eps <v>               superlinear regularization weight (0 needs ell > 1)\n"
    "  --tol <v> --tol-final <v> --max-iters <n> --r-cap <v> --seed <n>\n"
    "  --output-dir <dir>\n"
    "  verify only: --task <t> --problem <name> --meshes <list> --fields <n>\n"
    "               --q <v> --k <v> --r1 <v> --r2 <v>\n"
    "\n"
    "exit codes: 0 ok, 1 usage, 2 hypothesis/geometry failure, 3 nonconvergence\n";

std::string csv_num(double d) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

struct CliError {
  int code;
  std::string message;
};

RunConfig parse_flags(const std::vector<std::string>& args, std::size_t start,
                      const std::string& problem_kind) {
  // find --config first so every flag can override it
  RunConfig cfg;
  for (std::size_t i = start; i + 1 < args.size(); ++i)
    if (args[i] == "--config") cfg = RunConfig::from_file(args[i + 1]);
  cfg.problem = problem_kind;

  static const std::map<std::string, std::string> flag_to_key = {
      {"--operator", "operator"},   {"--nonlinearity", "nonlinearity"},
      {"--mesh", "mesh"},           {"--f", "f"},
      {"--schedule", "schedule"},   {"--variant", "variant"},
      {"--eps", "eps"},             {"--tol", "tol"},
      {"--tol-final", "tol_final"}, {"--max-iters", "max_iters"},
      {"--r-cap", "r_cap"},         {"--seed", "seed"},
      {"--output-dir", "output_dir"}, {"--task", "task"},
      {"--problem", "verify_problem"}, {"--meshes", "meshes"},
      {"--fields", "fields"},       {"--q", "q"},
      {"--k", "k"},                 {"--r1", "r1"},
      {"--r2", "r2"},
  };
  for (std::size_t i = start; i < args.size(); ++i) {
    const std::string& flag = args[i];
    if (flag == "--config") {
      ++i;
      continue;
    }
    const auto it = flag_to_key.find(flag);
    if (it == flag_to_key.end()) throw CliError{1, "unknown flag '" + flag + "'"};
    if (i + 1 >= args.size()) throw CliError{1, "flag '" + flag + "' needs a value"};
    cfg.set_key(it->second, args[++i]);
  }
  return cfg;
}

Json config_echo(const RunConfig& cfg, const std::string& subcommand) {
  Json j = Json::object();
  j.set("subcommand", subcommand);
  j.set("operator", cfg.operator_spec);
  j.set("mesh", cfg.mesh_spec);
  j.set("source", cfg.source_spec);
  if (!cfg.nonlinearity_spec.empty()) j.set("nonlinearity", cfg.nonlinearity_spec);
  j.set("seed", static_cast<double>(cfg.seed));
  j.set("tol", cfg.tol);
  return j;
}

void write_report(const RunConfig& cfg, Json& report) {
  std::filesystem::create_directories(cfg.output_dir);
  write_text_file(cfg.output_dir + "/report.json", report.dump());
}

Mesh make_mesh(const RunConfig& cfg) {
  const auto [nx, ny] = cfg.mesh_cells();
  return build_mesh(cfg.mesh_dim(), nx, ny);
}

// ---- solve-linear ------------------------------------------------------------

int cmd_solve_linear(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  Json report = Json::object();
  report.set("config", config_echo(cfg, "solve-linear"));
  NFunctionPtr f_op;
  try {
    f_op = make_nfunction(cfg.operator_spec);
  } catch (const HypothesisError& e) {
    report.set("failure", Json::object()
                              .set("kind", "hypothesis")
                              .set("hypothesis", e.tag())
                              .set("witness", e.witness())
                              .set("message", e.what()));
    write_report(cfg, report);
    return 2;
  }
  const Mesh mesh = make_mesh(cfg);
  report.set("mesh", mesh.describe());
  const SourceTerm f = SourceTerm::parse(cfg.source_spec);

  SolverConfig scfg;
  scfg.tol = cfg.tol;
  scfg.tol_final = cfg.tol_final;
  scfg.max_iters = cfg.max_iters;
  scfg.R_cap = cfg.r_cap;
  scfg.seed = cfg.seed;

  try {
    Field u(mesh);
    SolveReport srep;
    if (f_op->ell() > 1.0) {
      std::tie(u, srep) = solve_reflexive(mesh, *f_op, f, scfg);
      report.set("method", "minimization");
    } else {
      ContinuationSchedule schedule;
      const auto vals = cfg.schedule_values();
      if (vals.empty()) {
        schedule = ContinuationSchedule::geometric();
      } else {
        schedule.eps_values = vals;
      }
      std::tie(u, srep) = solve_continuation(mesh, *f_op, f, schedule, scfg);
      report.set("method", "continuation");
      const SPlusVerdict v = s_plus_diagnostic(srep, scfg.pairing_tol);
      report.set("s_plus", Json::object()
                               .set("pass", v.pass)
                               .set("pairing_ok", v.pairing_ok)
                               .set("increments_ok", v.increments_ok)
                               .set("max_tail_pairing", v.max_tail_pairing));
    }
    std::filesystem::create_directories(cfg.output_dir);
    write_field_csv(u, cfg.output_dir + "/u.csv");
    report.set("solve", to_json(srep));
    report.set("max_u", u.max_abs());
    write_report(cfg, report);
    out << "wrote " << cfg.output_dir << "/u.csv (max |u| = " << u.max_abs() << ")\n";
    return 0;
  } catch (const HypothesisError& e) {
    report.set("failure", Json::object()
                              .set("kind", "hypothesis")
                              .set("hypothesis", e.tag())
                              .set("message", e.what()));
    write_report(cfg, report);
    return 2;
  } catch (const BoundViolationError& e) {
    report.set("failure", Json::object()
                              .set("kind", "bound_violation")
                              .set("eps", e.eps())
                              .set("value", e.value())
                              .set("message", e.what()));
    write_report(cfg, report);
    return 2;
  } catch (const NonconvergenceError& e) {
    std::filesystem::create_directories(cfg.output_dir);
    Field best(mesh, e.best_iterate());
    write_field_csv(best, cfg.output_dir + "/u.csv");
    report.set("failure", Json::object()
                              .set("kind", "nonconvergence")
                              .set("residual", e.residual())
                              .set("message", e.what()));
    write_report(cfg, report);
    return 3;
  }
}

// ---- solve-superlinear ---------------------------------------------------------

int cmd_solve_superlinear(RunConfig cfg, std::ostream& out) {
  if (cfg.operator_spec.empty()) cfg.operator_spec = "power:p=2";
  cfg.validate();
  Json report = Json::object();
  report.set("config", config_echo(cfg, "solve-superlinear"));

  NFunctionPtr base;
  NonlinearityPtr nl;
  try {
    base = make_nfunction(cfg.operator_spec);
    nl = make_nonlinearity(cfg.nonlinearity_spec);
  } catch (const HypothesisError& e) {
    report.set("failure", Json::object()
                              .set("kind", "hypothesis")
                              .set("hypothesis", e.tag())
                              .set("witness", e.witness())
                              .set("message", e.what()));
    write_report(cfg, report);
    return 2;
  }

  const Mesh mesh = make_mesh(cfg);
  report.set("mesh", mesh.describe());

  NFunctionPtr f_eps;
  if (cfg.eps > 0.0) {
    f_eps = regularize(base, cfg.eps);
  } else {
    if (!(base->ell() > 1.0)) {
      report.set("failure",
                 Json::object()
                     .set("kind", "hypothesis")
                     .set("hypothesis", "phi3")
                     .set("message", "eps = 0 is only allowed for operators with "
                                     "lower growth index above 1"));
      write_report(cfg, report);
      return 2;
    }
    f_eps = base;
    report.set("eps_zero_mode", true);
  }

  const Variant variant = cfg.variant == "plus"    ? Variant::Plus
                          : cfg.variant == "minus" ? Variant::Minus
                                                   : Variant::Full;
  MountainPassConfig mcfg;
  mcfg.tol = cfg.tol;
  mcfg.seed = cfg.seed;
  mcfg.lambda_cfg.seed = cfg.seed;

  try {
    auto [u, srep] = mountain_pass_solve(*f_eps, *nl, variant, mesh, mcfg);
    std::filesystem::create_directories(cfg.output_dir);
    write_field_csv(u, cfg.output_dir + "/u.csv");
    {
      std::ostringstream sweeps;
      sweeps << "sweep,level,cerami_metric,residual\n";
      for (std::size_t s = 0; s < srep.energy_history.size(); ++s)
        sweeps << s << ',' << csv_num(srep.energy_history[s]) << ','
               << csv_num(srep.cerami_history[s]) << ','
               << csv_num(srep.residual_history[s]) << '\n';
      write_text_file(cfg.output_dir + "/sweeps.csv", sweeps.str());
    }
    report.set("solve", to_json(srep));
    report.set("level", srep.level);
    report.set("r0", srep.r0);
    write_report(cfg, report);
    out << "wrote " << cfg.output_dir << "/u.csv (level = " << srep.level << ")\n";
    return 0;
  } catch (const GeometryError& e) {
    report.set("failure", Json::object()
                              .set("kind", "geometry")
                              .set("hypothesis", e.tag())
                              .set("message", e.what()));
    write_report(cfg, report);
    return 2;
  } catch (const HypothesisError& e) {
    report.set("failure", Json::object()
                              .set("kind", "hypothesis")
                              .set("hypothesis", e.tag())
                              .set("message", e.what()));
    write_report(cfg, report);
    return 2;
  } catch (const NonconvergenceError& e) {
    std::filesystem::create_directories(cfg.output_dir);
    Field best(mesh, e.best_iterate());
    write_field_csv(best, cfg.output_dir + "/u.csv");
    report.set("failure", Json::object()
                              .set("kind", "nonconvergence")
                              .set("residual", e.residual())
                              .set("message", e.what()));
    write_report(cfg, report);
    return 3;
  }
}

// ---- verify ---------------------------------------------------------------------

ConvergenceProblem known_problem(const std::string& name) {
  ConvergenceProblem p;
  p.name = name;
  if (name == "poisson1d") {
    p.operator_spec = "power:p=2";
    p.exact = [](double x) { return 0.5 * x * (1.0 - x); };
  } else if (name == "plap3") {
    p.operator_spec = "power:p=3";
    p.exact = [](double x) {
      return (2.0 / 3.0) * (std::pow(0.5, 1.5) - std::pow(std::fabs(x - 0.5), 1.5));
    };
  } else if (name == "log1d") {
    p.operator_spec = "logarithmic";
    p.exact = [](double x) {
      const double s = std::min(x, 1.0 - x);
      return std::exp(0.5) - std::exp(0.5 - s) - s;
    };
  } else {
    throw ConfigError("no closed-form oracle for verify problem '" + name + "'");
  }
  return p;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  Json report = Json::object();
  report.set("config", config_echo(cfg, "verify"));
  report.set("task", cfg.task);
  std::filesystem::create_directories(cfg.output_dir);

  SolverConfig scfg;
  scfg.tol = cfg.tol;
  scfg.max_iters = cfg.max_iters;
  scfg.seed = cfg.seed;

  if (cfg.task == "poincare") {
    const NFunctionPtr f_op = make_nfunction(
        cfg.operator_spec.empty() ? "power:p=2" : cfg.operator_spec);
    const Mesh mesh = make_mesh(cfg);
    const double lambda1 = estimate_lambda1(mesh, *f_op, scfg);
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Field> fields;
    for (int kf = 0; kf < cfg.num_fields; ++kf) {
      Field u(mesh);
      for (int i = 0; i < u.size(); ++i)
        if (!mesh.on_boundary(i)) u[i] = gauss(rng);
      fields.push_back(std::move(u));
    }
    const PoincareReport rep = poincare_check(fields, *f_op, lambda1);
    report.set("lambda1", lambda1);
    report.set("checked", rep.checked);
    report.set("norm_violations", static_cast<double>(rep.norm_violations.size()));
    report.set("lambda_violations", static_cast<double>(rep.lambda_violations.size()));
    report.set("max_norm_ratio", rep.max_norm_ratio);
    report.set("pass", rep.pass());
    write_report(cfg, report);
    out << "poincare: " << (rep.pass() ? "pass" : "VIOLATIONS") << " over "
        << rep.checked << " fields\n";
    return 0;
  }

  if (cfg.task == "moser") {
    const NFunctionPtr f_op = make_nfunction(
        cfg.operator_spec.empty() ? "power:p=1.5" : cfg.operator_spec);
    const std::string mesh_spec = cfg.mesh_spec.rfind("2d:", 0) == 0 ? cfg.mesh_spec
                                                                     : "2d:16";
    RunConfig mcfg = cfg;
    mcfg.mesh_spec = mesh_spec;
    const Mesh mesh = make_mesh(mcfg);
    const SourceTerm f = SourceTerm::parse(cfg.source_spec);
    auto [u, srep] = solve_reflexive(mesh, *f_op, f, scfg);

    MoserParams params;
    params.q = cfg.moser_q;
    params.m = f_op->em();
    params.N = 2.0;
    params.k = cfg.moser_k;
    params.r1 = cfg.moser_r1;
    params.r2 = cfg.moser_r2;
    params.frozen_C = fit_moser_constant(u, f, params);
    const NormLadder ladder = moser_ladder(u, f, params);

    std::ostringstream csv;
    csv << "n,exponent,radius,measure,level\n";
    for (std::size_t n = 0; n < ladder.levels.size(); ++n)
      csv << n << ',' << csv_num(ladder.exponents[n]) << ','
          << csv_num(ladder.radii[n]) << ',' << csv_num(ladder.measures[n]) << ','
          << csv_num(ladder.levels[n]) << '\n';
    write_text_file(cfg.output_dir + "/ladder.csv", csv.str());

    report.set("chi", params.chi());
    report.set("beta", params.beta());
    report.set("fitted_C", *params.frozen_C);
    report.set("sup_estimate", ladder.sup_estimate);
    report.set("bound_value", ladder.bound_value);
    report.set("bound_ok", ladder.bound_ok);
    report.set("levels", Json(ladder.levels));
    write_report(cfg, report);
    out << "moser: chi=" << params.chi() << " beta=" << params.beta()
        << " sup~" << ladder.sup_estimate << "\n";
    return 0;
  }

  if (cfg.task == "convergence") {
    const ConvergenceProblem problem = known_problem(cfg.verify_problem);
    const auto ladder = cfg.mesh_ladder();
    const RateTable table = convergence_study(problem, ladder, scfg);
    std::ostringstream csv;
    csv << "cells,h,err_linf,err_w1phi\n";
    for (const auto& r : table.rows)
      csv << r.cells << ',' << csv_num(r.h) << ',' << csv_num(r.err_linf) << ','
          << csv_num(r.err_w1phi) << '\n';
    write_text_file(cfg.output_dir + "/rates.csv", csv.str());
    report.set("problem", problem.name);
    report.set("rate_linf", table.rate_linf);
    report.set("rate_w1phi", table.rate_w1phi);
    write_report(cfg, report);
    out << "convergence(" << problem.name << "): rate_linf=" << table.rate_linf
        << "\n";
    return 0;
  }

  throw CliError{1, "unknown verify task '" + cfg.task + "'"};
}

int cmd_catalog(std::ostream& out) {
  out << "operators:\n"
      << "  power:p=<float>     phi(t) = t^(p-2), indices ell = m = p\n"
      << "  logarithmic         phi(t) = log(1+t)/t, indices ell = 1, m = 2\n"
      << "  custom:<path>       two-column t,phi(t) table, validated on load\n"
      << "nonlinearities:\n"
      << "  power:q=<float>     g(t) = |t|^(q-2) t\n"
      << "  powerlog:m=<float>  g(t) = |t|^(m-2) t log(1+|t|)\n"
      << "  custom:<path>       two-column t,g(t) table with numeric primitive\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  if (args.empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help") {
    out << kUsage;
    return args.empty() ? 1 : 0;
  }
  const std::string& sub = args[0];
  try {
    if (sub == "catalog") return cmd_catalog(out);
    if (sub == "solve-linear")
      return cmd_solve_linear(parse_flags(args, 1, "linear"), out);
    if (sub == "solve-superlinear")
      return cmd_solve_superlinear(parse_flags(args, 1, "superlinear"), out);
    if (sub == "verify") {
      RunConfig cfg = parse_flags(args, 1, "linear");
      return cmd_verify(cfg, out);
    }
    err << "unknown subcommand '" << sub << "'\n" << kUsage;
    return 1;
  } catch (const CliError& e) {
    err << "error: " << e.message << "\n" << kUsage;
    return e.code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n" << kUsage;
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace orlicz
