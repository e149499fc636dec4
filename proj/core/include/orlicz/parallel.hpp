#ifndef ORLICZ_PARALLEL_HPP
#define ORLICZ_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace orlicz {

// Number of worker threads element loops may use.  Defaults to the
// hardware count capped at 4; the ORLICZ_SOLVER_THREADS environment
// variable (read once) lowers or raises the cap.
int max_threads();

// Sum of term(i) for i in [0, n).  Work is split into fixed-size chunks
// whose partial sums are combined in chunk order, so the result is
// bit-identical regardless of how many threads execute the chunks.
double chunked_sum(std::size_t n, const std::function<double(std::size_t)>& term);

}  // namespace orlicz

#endif
