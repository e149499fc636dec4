#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "orlicz/energy.hpp"

using namespace orlicz;

namespace {

Field interpolate(const Mesh& mesh, const std::function<double(double, double)>& fn,
                  bool dirichlet = true) {
  std::vector<double> nodal(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    nodal[i] = fn(mesh.coord(i, 0), mesh.dim() == 2 ? mesh.coord(i, 1) : 0.0);
  return Field(mesh, std::move(nodal), dirichlet);
}

Field random_dirichlet(const Mesh& mesh, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Field u(mesh);
  for (int i = 0; i < u.size(); ++i)
    if (!mesh.on_boundary(i)) u[i] = gauss(rng);
  return u;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> free_part(const Mesh& mesh, const Field& v) {
  std::vector<double> out(mesh.num_free());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (mesh.free_index(i) >= 0) out[mesh.free_index(i)] = v[i];
  return out;
}

}  // namespace

TEST_CASE("linear energy basics") {
  const Mesh mesh = Mesh::interval(64);
  const auto laplace = make_nfunction("power:p=2");
  const SourceTerm f(1.0);

  const Field zero(mesh);
  const auto e0 = energy_linear(zero, *laplace, f);
  CHECK(e0.total == 0.0);
  CHECK(e0.dirichlet_part == 0.0);

  std::mt19937_64 rng(3);
  const SourceTerm none(0.0);
  for (int rep = 0; rep < 20; ++rep) {
    const Field u = random_dirichlet(mesh, rng);
    const auto ev = energy_linear(u, *laplace, none);
    CHECK(ev.total >= 0.0);
    CHECK(ev.total == doctest::Approx(ev.dirichlet_part));
  }
}

TEST_CASE("poisson energy approaches the analytic minimum") {
  // I(u*) = -1/24 for u* = x(1-x)/2 with unit source
  const Mesh mesh = Mesh::interval(512);
  const auto laplace = make_nfunction("power:p=2");
  const Field u = interpolate(mesh, [](double x, double) { return oracles::poisson_exact(x); });
  const auto ev = energy_linear(u, *laplace, SourceTerm(1.0));
  CHECK(ev.total == doctest::Approx(-1.0 / 24.0).epsilon(2e-5));
  CHECK(ev.total == doctest::Approx(ev.dirichlet_part - ev.load_part).epsilon(1e-15));
}

TEST_CASE("residual vanishes at the discrete poisson solution") {
  // with midpoint loads the nodal interpolant of x(1-x)/2 is the discrete
  // solution, so the assembled residual must vanish identically
  const Mesh mesh = Mesh::interval(64);
  const auto laplace = make_nfunction("power:p=2");
  const Field u = interpolate(mesh, [](double x, double) { return oracles::poisson_exact(x); });
  for (double ri : residual_linear(u, *laplace, SourceTerm(1.0)))
    CHECK(std::fabs(ri) <= 1e-12);
}

TEST_CASE("residual of the zero field is minus the load") {
  const Mesh mesh = Mesh::interval(16);
  const auto laplace = make_nfunction("power:p=2");
  const Field zero(mesh);
  const auto r = residual_linear(zero, *laplace, SourceTerm(1.0));
  const double h = 1.0 / 16.0;
  for (double ri : r) CHECK(ri == doctest::Approx(-h).epsilon(1e-13));
}

TEST_CASE("residual equals the one-sided energy quotient") {
  const Mesh mesh = Mesh::interval(32);
  std::mt19937_64 rng(5);
  const SourceTerm f(1.0);
  for (const char* spec : {"power:p=2", "power:p=3", "logarithmic"}) {
    const auto op = make_nfunction(spec);
    const Field u = interpolate(mesh, [](double x, double) {
      return 0.3 * std::sin(std::acos(-1.0) * x);
    });
    const Field v = interpolate(mesh, [](double x, double) {
      return 0.05 * std::sin(2.0 * std::acos(-1.0) * x);
    });
    const auto r = residual_linear(u, *op, f);
    const double h = 1e-5;
    Field up = u;
    for (int i = 0; i < up.size(); ++i) up[i] += h * v[i];
    const double quotient =
        (energy_linear(up, *op, f).total - energy_linear(u, *op, f).total) / h;
    CHECK(std::fabs(quotient - dot(r, free_part(mesh, v))) <= 1e-6);
  }
}

TEST_CASE("hessian action: laplacian case, symmetry, difference quotient") {
  const Mesh mesh = Mesh::interval(24);
  const auto laplace = make_nfunction("power:p=2");
  std::mt19937_64 rng(9);
  const double pi = std::acos(-1.0);
  const Field u = interpolate(mesh, [&](double x, double) { return 0.3 * std::sin(pi * x); });
  const Field w = interpolate(mesh, [&](double x, double) { return 0.1 * std::sin(2.0 * pi * x); });
  const Field z = random_dirichlet(mesh, rng, 0.4);

  // for Phi = t^2/2 the action does not depend on the state
  const auto hw_at_u = hessian_apply(u, *laplace, w);
  const Field zero(mesh);
  const auto hw_at_0 = hessian_apply(zero, *laplace, w);
  for (std::size_t i = 0; i < hw_at_u.size(); ++i)
    CHECK(hw_at_u[i] == doctest::Approx(hw_at_0[i]).epsilon(1e-12));

  for (const char* spec : {"power:p=3", "logarithmic"}) {
    const auto op = make_nfunction(spec);
    const auto hw = hessian_apply(u, *op, w);
    const auto hz = hessian_apply(u, *op, z);
    CHECK(dot(hw, free_part(mesh, z)) ==
          doctest::Approx(dot(hz, free_part(mesh, w))).epsilon(1e-12));

    // consistency with the residual difference quotient
    const double h = 1e-6;
    Field up = u;
    for (int i = 0; i < up.size(); ++i) up[i] += h * w[i];
    const SourceTerm f(1.0);
    const auto r0 = residual_linear(u, *op, f);
    const auto r1 = residual_linear(up, *op, f);
    for (std::size_t i = 0; i < r0.size(); ++i)
      CHECK(std::fabs((r1[i] - r0[i]) / h - hw[i]) <= 1e-5);
  }
}

TEST_CASE("superlinear functional values") {
  const Mesh mesh = Mesh::interval(32);
  const auto base = make_nfunction("power:p=2");
  const auto f_eps = regularize(base, 1e-4);
  const auto nl = make_nonlinearity("power:q=4");

  const Field zero(mesh);
  CHECK(energy_superlinear(zero, *f_eps, *nl, Variant::Full).total == 0.0);

  // nonpositive field: the plus-truncated load vanishes
  const Field neg = interpolate(mesh, [](double x, double) {
    return -std::sin(std::acos(-1.0) * x);
  });
  const auto jp = energy_superlinear(neg, *f_eps, *nl, Variant::Plus);
  CHECK(jp.load_part == 0.0);
  CHECK(jp.total == doctest::Approx(jp.dirichlet_part));
}

TEST_CASE("powerlog primitive closed form vs quadrature") {
  const auto nl = make_nonlinearity("powerlog:m=2");
  CHECK(nl->G(1.0) == doctest::Approx(0.25).epsilon(1e-13));
  for (double t : {0.3, 1.0, 4.0, 50.0}) {
    const double ref = oracles::simpson(
        [](double s) { return s * std::log1p(s); }, 0.0, t, 4096);
    CHECK(nl->G(t) == doctest::Approx(ref).epsilon(1e-9));
    CHECK(nl->G(-t) == nl->G(t));
  }
  // non-closed-form exponent goes through adaptive quadrature
  const auto nl3 = make_nonlinearity("powerlog:m=2.5");
  for (double t : {0.5, 2.0, 9.0}) {
    const double ref = oracles::simpson(
        [](double s) { return std::pow(s, 1.5) * std::log1p(s); }, 0.0, t, 4096);
    CHECK(nl3->G(t) == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("defect integral") {
  const Mesh mesh = Mesh::interval(16);
  const auto nl = make_nonlinearity("power:q=4");
  const Field zero(mesh);
  CHECK(gbar_integral(zero, *nl, 2.0) == 0.0);

  // g = t^3 with m = 2: gbar = t^4 - 2 t^4/4 = t^4/2
  CHECK(nl->gbar(1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-14));
  const Field u = interpolate(mesh, [](double x, double) {
    return std::sin(std::acos(-1.0) * x);
  });
  double ref = 0.0;
  for (int e = 0; e < mesh.num_elements(); ++e) {
    const double v = u.value_at_quadrature(e);
    ref += mesh.weight(e) * 0.5 * v * v * v * v;
  }
  CHECK(gbar_integral(u, *nl, 2.0) == doctest::Approx(ref).epsilon(1e-13));

  // exponent equal to m: the defect vanishes identically
  const auto borderline = make_nonlinearity("power:q=2");
  for (double t : {0.1, 1.0, 17.0}) CHECK(borderline->gbar(t, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("truncations") {
  const auto nl = make_nonlinearity("power:q=4");
  for (double t : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    CHECK(nl->g_trunc(t, Variant::Plus) == (t >= 0.0 ? nl->g(t) : 0.0));
    CHECK(nl->g_trunc(t, Variant::Minus) == (t <= 0.0 ? nl->g(t) : 0.0));
    CHECK(nl->G_trunc(t, Variant::Plus) == (t >= 0.0 ? nl->G(t) : 0.0));
  }

  const Mesh mesh = Mesh::interval(32);
  const auto f_eps = regularize(make_nfunction("power:p=2"), 1e-4);
  const Field pos = interpolate(mesh, [](double x, double) {
    return std::sin(std::acos(-1.0) * x);
  });
  CHECK(energy_superlinear(pos, *f_eps, *nl, Variant::Full).total ==
        doctest::Approx(energy_superlinear(pos, *f_eps, *nl, Variant::Plus).total)
            .epsilon(1e-15));
  Field negf = pos;
  for (int i = 0; i < negf.size(); ++i) negf[i] = -negf[i];
  CHECK(energy_superlinear(negf, *f_eps, *nl, Variant::Full).total ==
        doctest::Approx(energy_superlinear(negf, *f_eps, *nl, Variant::Minus).total)
            .epsilon(1e-15));
}

TEST_CASE("slow superlinear growth: fast against t^m, slow against every t^theta") {
  const auto nl = make_nonlinearity("powerlog:m=2");
  const double g3 = nl->G(1e3), g6 = nl->G(1e6);
  CHECK(g6 / std::pow(1e6, 2.0) > g3 / std::pow(1e3, 2.0));
  // the theta = 2.1 ratio log(t)/t^0.1 peaks near t = e^10, so its decay
  // only becomes visible further out on the growth grid
  const double theta = 2.1;
  CHECK(nl->G(1e12) / std::pow(1e12, theta) < nl->G(1e9) / std::pow(1e9, theta));
  CHECK(g6 / std::pow(1e6, 2.5) < g3 / std::pow(1e3, 2.5));
}

TEST_CASE("midpoint convexity of the linear energy") {
  const Mesh mesh = Mesh::interval(20);
  std::mt19937_64 rng(21);
  const SourceTerm f(1.0);
  for (const char* spec : {"power:p=3", "logarithmic"}) {
    const auto op = make_nfunction(spec);
    for (int rep = 0; rep < 25; ++rep) {
      const Field u = random_dirichlet(mesh, rng);
      const Field v = random_dirichlet(mesh, rng);
      Field mid = u;
      for (int i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (u[i] + v[i]);
      const double lhs = energy_linear(mid, *op, f).total;
      const double rhs = 0.5 * (energy_linear(u, *op, f).total +
                                energy_linear(v, *op, f).total);
      CHECK(lhs <= rhs + 1e-12 * (1.0 + std::fabs(rhs)));
    }
  }
}

TEST_CASE("nonlinearity diagnostics and witnesses") {
  const auto nl = make_nonlinearity("power:q=4");
  CHECK(nl->g(0.0) == 0.0);

  auto mutable_nl = std::make_shared<PowerNonlinearity>(4.0);
  mutable_nl->set_psi_witness(std::make_shared<const PowerNFunction>(4.0));
  std::vector<double> grid;
  for (double t = 0.25; t <= 50.0; t += 0.25) grid.push_back(t);
  CHECK(mutable_nl->g1_constant(grid) > 0.0);
  CHECK(std::isfinite(mutable_nl->g1_constant(grid)));
  // the index window m < ell_psi <= m_psi < N/(N-1) cannot hold here
  CHECK_THROWS_AS(mutable_nl->validate_witnesses(2.0, 2.0), HypothesisError);

  auto with_gamma = std::make_shared<PowerNonlinearity>(4.0);
  with_gamma->set_gamma_witness(std::make_shared<const PowerNFunction>(3.0));
  CHECK_NOTHROW(with_gamma->validate_witnesses(2.0, 2.0));  // ell_gamma = 3 > N = 2
}

TEST_CASE("custom nonlinearity approximates its generator") {
  std::vector<double> t, g;
  for (int i = 0; i <= 120; ++i) {
    const double ti = 0.05 + 10.0 * i / 120.0;
    t.push_back(ti);
    g.push_back(ti * ti * ti);
  }
  const CustomNonlinearity nl(t, g);
  for (double x : {0.3, 1.0, 5.0}) {
    CHECK(nl.g(x) == doctest::Approx(x * x * x).epsilon(1e-3));
    CHECK(nl.g(-x) == doctest::Approx(-nl.g(x)).epsilon(1e-15));
    CHECK(nl.G(x) == doctest::Approx(x * x * x * x / 4.0).epsilon(5e-3));
    CHECK(nl.dg(x) == doctest::Approx(3.0 * x * x).epsilon(5e-2));
  }
}

TEST_CASE("spatial coefficient scales the load terms") {
  const Mesh mesh = Mesh::interval(32);
  auto nl = std::make_shared<PowerNonlinearity>(4.0);
  const Field u = interpolate(mesh, [](double x, double) {
    return std::sin(std::acos(-1.0) * x);
  });
  const double plain = gbar_integral(u, *nl, 2.0);
  nl->set_coefficient([](double, double) { return 2.0; });
  CHECK(gbar_integral(u, *nl, 2.0) == doctest::Approx(2.0 * plain).epsilon(1e-14));
}
