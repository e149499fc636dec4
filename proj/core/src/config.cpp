#include "orlicz/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(path + ":" + std::to_string(lineno) + ": bad section header");
      continue;  // sections are cosmetic grouping; keys stay flat
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    cfg.set_key(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

void RunConfig::set_key(const std::string& key, const std::string& value) {
  if (key == "problem") problem = value;
  else if (key == "operator") operator_spec = value;
  else if (key == "nonlinearity") nonlinearity_spec = value;
  else if (key == "mesh") mesh_spec = value;
  else if (key == "f" || key == "source") source_spec = value;
  else if (key == "schedule") schedule_spec = value;
  else if (key == "variant") variant = value;
  else if (key == "eps") eps = std::stod(value);
  else if (key == "tol") tol = std::stod(value);
  else if (key == "tol_final") tol_final = std::stod(value);
  else if (key == "max_iters") max_iters = std::stoi(value);
  else if (key == "r_cap") r_cap = std::stod(value);
  else if (key == "seed") seed = std::stoul(value);
  else if (key == "output_dir") output_dir = value;
  else if (key == "task") task = value;
  else if (key == "verify_problem") verify_problem = value;
  else if (key == "meshes") meshes_spec = value;
  else if (key == "fields") num_fields = std::stoi(value);
  else if (key == "q") moser_q = std::stod(value);
  else if (key == "k") moser_k = std::stod(value);
  else if (key == "r1") moser_r1 = std::stod(value);
  else if (key == "r2") moser_r2 = std::stod(value);
  else throw ConfigError("unknown config key '" + key + "'");
}

void RunConfig::validate() const {
  if (problem != "linear" && problem != "superlinear")
    throw ConfigError("problem must be linear or superlinear");
  if (operator_spec.empty()) throw ConfigError("operator is required");
  if (problem == "superlinear" && nonlinearity_spec.empty())
    throw ConfigError("superlinear runs need a nonlinearity");
  if (variant != "full" && variant != "plus" && variant != "minus")
    throw ConfigError("variant must be full, plus or minus");
  if (!(tol > 0.0) || !(tol_final > 0.0))
    throw ConfigError("tolerances must be positive");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  mesh_dim();  // throws on malformed mesh specs
  mesh_cells();
}

int RunConfig::mesh_dim() const {
  if (mesh_spec.rfind("1d:", 0) == 0) return 1;
  if (mesh_spec.rfind("2d:", 0) == 0) return 2;
  throw ConfigError("mesh must look like 1d:<n> or 2d:<nx>[x<ny>]");
}

std::pair<int, int> RunConfig::mesh_cells() const {
  const std::string body = mesh_spec.substr(3);
  const auto x = body.find('x');
  try {
    if (x == std::string::npos) {
      const int n = std::stoi(body);
      return {n, n};
    }
    return {std::stoi(body.substr(0, x)), std::stoi(body.substr(x + 1))};
  } catch (const std::exception&) {
    throw ConfigError("bad mesh resolution in '" + mesh_spec + "'");
  }
}

std::vector<double> RunConfig::schedule_values() const {
  if (schedule_spec.empty()) return {};
  std::vector<double> out;
  if (schedule_spec.rfind("geometric:", 0) == 0) {
    const int steps = std::stoi(schedule_spec.substr(10));
    for (int kk = 0; kk <= steps; ++kk) out.push_back(std::pow(2.0, -kk));
    return out;
  }
  for (const auto& tok : split(schedule_spec, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

std::vector<int> RunConfig::mesh_ladder() const {
  std::vector<int> out;
  for (const auto& tok : split(meshes_spec, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  if (out.empty()) throw ConfigError("meshes list is empty");
  return out;
}

}  // namespace orlicz
