#ifndef ORLICZ_CLI_HPP
#define ORLICZ_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace orlicz {

// Batch entry point behind the orlicz-solver binary; callable in-process so
// the pipeline is testable without spawning.  Exit codes: 0 success,
// 1 usage error, 2 hypothesis/geometry failure, 3 nonconvergence (the best
// iterate is still written).  Every failure exit still writes report.json
// naming the violated hypothesis or the stalled metric.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace orlicz

#endif
