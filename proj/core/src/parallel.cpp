#include "orlicz/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace orlicz {

namespace {

int read_thread_cap() {
  unsigned hw = std::thread::hardware_concurrency();
  int cap = static_cast<int>(hw == 0 ? 1 : hw);
  if (cap > 4) cap = 4;
  if (const char* env = std::getenv("ORLICZ_SOLVER_THREADS")) {
    const int requested = std::atoi(env);
    if (requested >= 1) cap = requested;
  }
  return cap;
}

constexpr std::size_t kChunk = 2048;

}  // namespace

int max_threads() {
  static const int cap = read_thread_cap();
  return cap;
}

double chunked_sum(std::size_t n, const std::function<double(std::size_t)>& term) {
  if (n == 0) return 0.0;
  const std::size_t nchunks = (n + kChunk - 1) / kChunk;
  const int nthreads = max_threads();
  if (nthreads <= 1 || nchunks == 1) {
    double total = 0.0;
    for (std::size_t c = 0; c < nchunks; ++c) {
      double partial = 0.0;
      const std::size_t hi = std::min(n, (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < hi; ++i) partial += term(i);
      total += partial;
    }
    return total;
  }

  std::vector<double> partials(nchunks, 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= nchunks) return;
      double partial = 0.0;
      const std::size_t hi = std::min(n, (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < hi; ++i) partial += term(i);
      partials[c] = partial;
    }
  };
  std::vector<std::thread> pool;
  const int spawn = static_cast<int>(std::min<std::size_t>(nthreads, nchunks));
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  double total = 0.0;
  for (double p : partials) total += p;  // fixed chunk order
  return total;
}

}  // namespace orlicz
