#ifndef ORLICZ_CONFIG_HPP
#define ORLICZ_CONFIG_HPP

#include <string>
#include <vector>

namespace orlicz {

// One batch run.  Populated from an INI-style config file (flat key=value
// with optional [section] headers, '#' comments) and/or command-line flags;
// flags win over file keys.
struct RunConfig {
  std::string problem = "linear";      // linear | superlinear
  std::string operator_spec;           // catalog operator name
  std::string nonlinearity_spec;       // superlinear runs only
  std::string mesh_spec = "1d:64";     // "1d:<n>" | "2d:<n>" | "2d:<nx>x<ny>"
  std::string source_spec = "const:1"; // const:<v> | file:<path>
  std::string schedule_spec;           // "geometric:<k>" or comma list; empty = default
  std::string variant = "full";        // full | plus | minus
  double eps = 1e-4;                   // superlinear regularization weight
  double tol = 1e-10;
  double tol_final = 1e-9;
  int max_iters = 200;
  double r_cap = 1e4;
  unsigned long seed = 0;
  std::string output_dir = ".";

  // verify subcommand
  std::string task = "poincare";       // poincare | moser | convergence
  std::string verify_problem = "poisson1d";
  std::string meshes_spec = "16,32,64,128,256";
  int num_fields = 100;
  double moser_q = 4.0;
  double moser_k = 1.0;
  double moser_r1 = 0.25;
  double moser_r2 = 0.125;

  static RunConfig from_file(const std::string& path);
  void set_key(const std::string& key, const std::string& value);
  void validate() const;

  // decoded helpers
  int mesh_dim() const;
  std::pair<int, int> mesh_cells() const;
  std::vector<double> schedule_values() const;  // empty = use the default ladder
  std::vector<int> mesh_ladder() const;
};

}  // namespace orlicz

#endif
