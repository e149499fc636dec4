#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "orlicz/cli.hpp"

using namespace orlicz;
namespace fs = std::filesystem;

namespace {

int run(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (out_text) *out_text = out.str() + err.str();
  return code;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

double csv_value_at(const std::string& path, double x_target) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, ',');
    std::getline(ls, tok, ',');
    const double x = std::stod(tok);
    std::getline(ls, tok, ',');
    if (std::fabs(x - x_target) < 1e-12) return std::stod(tok);
  }
  FAIL("node not found in csv");
  return 0.0;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str(const std::string& sub = "") const {
    return (sub.empty() ? path : path / sub).string();
  }
};

}  // namespace

TEST_CASE("catalog and usage") {
  std::string text;
  CHECK(run({"catalog"}, &text) == 0);
  CHECK(text.find("power:p=<float>") != std::string::npos);
  CHECK(text.find("logarithmic") != std::string::npos);
  CHECK(text.find("powerlog:m=<float>") != std::string::npos);

  CHECK(run({}) == 1);
  CHECK(run({"no-such-subcommand"}) == 1);
  CHECK(run({"solve-linear", "--bogus-flag", "1"}) == 1);
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("solve-linear writes the solution and report") {
  TempDir dir("orlicz_cli_lin");
  CHECK(run({"solve-linear", "--operator", "logarithmic", "--mesh", "1d:128", "--f",
             "const:1", "--output-dir", dir.str()}) == 0);
  const double mid = csv_value_at(dir.str("u.csv"), 0.5);
  CHECK(std::fabs(mid - oracles::logflux_exact(0.5)) <= 1e-3);
  const std::string rep = slurp(dir.str("report.json"));
  CHECK(rep.find("\"method\": \"continuation\"") != std::string::npos);
  CHECK(rep.find("\"s_plus\"") != std::string::npos);
  CHECK(rep.find("\"bound_monitor\"") != std::string::npos);
}

TEST_CASE("identical config and seed give bit-identical outputs") {
  TempDir a("orlicz_cli_det_a"), b("orlicz_cli_det_b");
  const std::vector<std::string> base = {"solve-linear", "--operator", "logarithmic",
                                         "--mesh", "1d:64", "--f", "const:1",
                                         "--seed", "42"};
  auto with_dir = [&](const std::string& d) {
    auto v = base;
    v.push_back("--output-dir");
    v.push_back(d);
    return v;
  };
  CHECK(run(with_dir(a.str())) == 0);
  CHECK(run(with_dir(b.str())) == 0);
  CHECK(slurp(a.str("u.csv")) == slurp(b.str("u.csv")));

  // reports differ only in the output path; compare after masking it out
  std::string ra = slurp(a.str("report.json")), rb = slurp(b.str("report.json"));
  CHECK(ra == rb);
}

TEST_CASE("config file keys with flag overrides") {
  TempDir dir("orlicz_cli_cfg");
  {
    std::ofstream cfg(dir.str("run.cfg"));
    cfg << "# batch run\n"
        << "[problem]\n"
        << "operator = power:p=2\n"
        << "f = const:1\n"
        << "[mesh]\n"
        << "mesh = 1d:32\n"
        << "[output]\n"
        << "output_dir = " << dir.str("out_file") << "\n";
  }
  CHECK(run({"solve-linear", "--config", dir.str("run.cfg"), "--mesh", "1d:64"}) == 0);
  const std::string rep = slurp(dir.str("out_file") + "/report.json");
  CHECK(rep.find("nodes=65") != std::string::npos);  // the flag won
}

TEST_CASE("failure exits still write reports naming the cause") {
  TempDir dir("orlicz_cli_fail");

  SUBCASE("hypothesis failure: invalid density") {
    CHECK(run({"solve-linear", "--operator", "power:p=0.5", "--mesh", "1d:32",
               "--output-dir", dir.str()}) == 2);
    const std::string rep = slurp(dir.str("report.json"));
    CHECK(rep.find("\"hypothesis\": \"phi1\"") != std::string::npos);
  }

  SUBCASE("geometry failure: sublinear growth relative to m") {
    CHECK(run({"solve-superlinear", "--nonlinearity", "power:q=1.2", "--mesh",
               "1d:32", "--output-dir", dir.str()}) == 2);
    const std::string rep = slurp(dir.str("report.json"));
    CHECK(rep.find("\"hypothesis\": \"g3\"") != std::string::npos);
  }

  SUBCASE("eps = 0 with a borderline operator") {
    CHECK(run({"solve-superlinear", "--operator", "logarithmic", "--nonlinearity",
               "powerlog:m=2", "--eps", "0", "--mesh", "1d:32", "--output-dir",
               dir.str()}) == 2);
    const std::string rep = slurp(dir.str("report.json"));
    CHECK(rep.find("\"hypothesis\": \"phi3\"") != std::string::npos);
  }

  SUBCASE("nonconvergence still writes the best iterate") {
    CHECK(run({"solve-linear", "--operator", "power:p=3", "--mesh", "1d:64",
               "--max-iters", "1", "--output-dir", dir.str()}) == 3);
    CHECK(fs::exists(dir.str("u.csv")));
    const std::string rep = slurp(dir.str("report.json"));
    CHECK(rep.find("\"kind\": \"nonconvergence\"") != std::string::npos);
  }
}

TEST_CASE("solve-superlinear writes climber, sweeps and level") {
  TempDir dir("orlicz_cli_mp");
  CHECK(run({"solve-superlinear", "--operator", "power:p=2", "--nonlinearity",
             "power:q=4", "--eps", "0", "--mesh", "1d:64", "--tol", "1e-8",
             "--variant", "plus", "--output-dir", dir.str()}) == 0);
  CHECK(fs::exists(dir.str("u.csv")));
  const std::string sweeps = slurp(dir.str("sweeps.csv"));
  CHECK(sweeps.rfind("sweep,level,cerami_metric,residual\n", 0) == 0);
  const std::string rep = slurp(dir.str("report.json"));
  CHECK(rep.find("\"level\"") != std::string::npos);
  CHECK(rep.find("\"r0\"") != std::string::npos);
  CHECK(rep.find("\"eps_zero_mode\": true") != std::string::npos);
}

TEST_CASE("verify subcommands") {
  TempDir dir("orlicz_cli_verify");

  SUBCASE("poincare") {
    CHECK(run({"verify", "--task", "poincare", "--operator", "logarithmic", "--mesh",
               "1d:48", "--fields", "50", "--output-dir", dir.str()}) == 0);
    const std::string rep = slurp(dir.str("report.json"));
    CHECK(rep.find("\"pass\": true") != std::string::npos);
  }

  SUBCASE("moser") {
    CHECK(run({"verify", "--task", "moser", "--operator", "power:p=1.5", "--f",
               "const:20", "--mesh", "2d:12", "--q", "4", "--output-dir",
               dir.str()}) == 0);
    CHECK(fs::exists(dir.str("ladder.csv")));
    const std::string rep = slurp(dir.str("report.json"));
    CHECK(rep.find("\"chi\": 4") != std::string::npos);
    CHECK(rep.find("\"bound_ok\": true") != std::string::npos);
  }

  SUBCASE("convergence") {
    CHECK(run({"verify", "--task", "convergence", "--problem", "poisson1d",
               "--meshes", "16,32,64", "--output-dir", dir.str()}) == 0);
    CHECK(fs::exists(dir.str("rates.csv")));
    const std::string rep = slurp(dir.str("report.json"));
    const std::string key = "\"rate_linf\": ";
    const auto pos = rep.find(key);
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(rep.substr(pos + key.size())) >= 1.9);
  }

  SUBCASE("unknown task") { CHECK(run({"verify", "--task", "nope"}) == 1); }
}
