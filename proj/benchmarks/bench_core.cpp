#include <benchmark/benchmark.h>

#include <random>

#include "orlicz/dirichlet.hpp"

using namespace orlicz;

namespace {

SampledMeasureSpace random_space(std::size_t n) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> w(0.1, 1.0);
  std::normal_distribution<double> v(0.0, 2.0);
  SampledMeasureSpace s;
  s.weights.resize(n);
  s.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.weights[i] = w(rng);
    s.values[i] = v(rng);
  }
  return s;
}

Field wavy_field(const Mesh& mesh) {
  Field u(mesh);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < u.size(); ++i) {
    if (mesh.on_boundary(i)) continue;
    double x = mesh.coord(i, 0);
    u[i] = std::sin(pi * x) + 0.2 * std::sin(5.0 * pi * x);
    if (mesh.dim() == 2) u[i] *= std::sin(pi * mesh.coord(i, 1));
  }
  return u;
}

}  // namespace

static void BM_LogDensityEval(benchmark::State& state) {
  const auto f = make_nfunction("logarithmic");
  double t = 1e-4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f->Phi(t));
    t = t < 1e4 ? t * 1.001 : 1e-4;
  }
}
BENCHMARK(BM_LogDensityEval);

static void BM_ConjugateEval(benchmark::State& state) {
  const auto f = make_nfunction("logarithmic");
  double t = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(conjugate_eval(*f, t));
    t = t < 20.0 ? t * 1.01 : 0.01;
  }
}
BENCHMARK(BM_ConjugateEval);

static void BM_LuxemburgNorm(benchmark::State& state) {
  const auto f = make_nfunction("logarithmic");
  const auto space = random_space(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(luxemburg_norm(space, *f));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LuxemburgNorm)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

static void BM_ResidualAssembly(benchmark::State& state) {
  const Mesh mesh = Mesh::unit_square(static_cast<int>(state.range(0)),
                                      static_cast<int>(state.range(0)));
  const auto f = make_nfunction("power:p=3");
  const Field u = wavy_field(mesh);
  const SourceTerm src(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(residual_linear(u, *f, src));
  state.SetComplexityN(mesh.num_elements());
}
BENCHMARK(BM_ResidualAssembly)->RangeMultiplier(2)->Range(8, 64)->Complexity();

static void BM_PoissonSolve1D(benchmark::State& state) {
  const Mesh mesh = Mesh::interval(static_cast<int>(state.range(0)));
  const auto f = make_nfunction("power:p=2");
  SolverConfig cfg;
  for (auto _ : state) {
    auto [u, rep] = solve_reflexive(mesh, *f, SourceTerm(1.0), cfg);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_PoissonSolve1D)->Arg(64)->Arg(256)->Arg(1024);

static void BM_LogContinuation1D(benchmark::State& state) {
  const Mesh mesh = Mesh::interval(static_cast<int>(state.range(0)));
  const auto f = make_nfunction("logarithmic");
  SolverConfig cfg;
  const auto schedule = ContinuationSchedule::geometric(10);
  for (auto _ : state) {
    auto [u, rep] = solve_continuation(mesh, *f, SourceTerm(1.0), schedule, cfg);
    benchmark::DoNotOptimize(u);
  }
}
BENCHMARK(BM_LogContinuation1D)->Arg(128)->Arg(512);

BENCHMARK_MAIN();
