#ifndef ORLICZ_SOLVE_REPORT_HPP
#define ORLICZ_SOLVE_REPORT_HPP

#include <string>
#include <vector>

namespace orlicz {

// One row of the a-priori bound monitor: the three gradient integrals
// tracked per regularization step, all of which must stay below a single
// cap for the continuation to be trusted.
struct BoundMonitorEntry {
  double eps = 0.0;
  double phi_integral = 0.0;   // \int Phi(|grad u_eps|)
  double flux_integral = 0.0;  // \int phi(|grad u_eps|) |grad u_eps|^2
  double w11 = 0.0;            // \int |grad u_eps|
  double max_entry() const;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  std::string failure;  // tag when a run ends abnormally

  // inner iteration history (Newton / relaxation sweeps)
  std::vector<double> energy_history;
  std::vector<double> residual_history;  // dual norms
  std::vector<double> cerami_history;    // mountain-pass runs only

  // continuation records, one entry per regularization step
  std::vector<double> eps_schedule;
  std::vector<BoundMonitorEntry> bound_monitor;
  std::vector<double> eps_energy_history;     // I_eps(u_eps), provably decreasing
  std::vector<double> eps_dirichlet_history;  // \int Phi_eps(|grad u_eps|)
  std::vector<double> pairing_history;        // <-Lap_Phi u_eps, u_eps - u_final>
  std::vector<double> increment_history;      // |u_{k+1} - u_k| in discrete W^{1,Phi}
  std::vector<double> w11_increment_history;

  double bound_R = 0.0;         // max bound-monitor entry over the ladder
  double final_residual = 0.0;  // dual norm at exit (unregularized form for
                                // continuation runs)
  double level = 0.0;           // mountain-pass level at exit
  double r0 = 0.0;              // certified rim level
  bool oracle_mode = false;     // 1D runs exercise the same paths as 2D
};

}  // namespace orlicz

#endif
