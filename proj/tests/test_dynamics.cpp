#include <doctest.h>

#include "nematic/director.hpp"
#include "nematic/dynamics.hpp"
#include "nematic/errors.hpp"
#include "nematic/solver.hpp"
#include "nematic/transport.hpp"
#include "support.hpp"

using namespace testing;

namespace {

std::array<double, 3> smooth_unit(double x, double y) {
  const double th = std::sin(x) + 0.5 * std::cos(y), ph = 0.5 * std::sin(x + y);
  return {std::cos(th) * std::cos(ph), std::sin(th) * std::cos(ph), std::sin(ph)};
}

// -lambda sum_k Lap d_k d_i d_k from fine finite differences of the closed form.
double force_oracle(int i, double x, double y, double lambda) {
  const double e = 1e-3, q = 1e-2;
  auto d = [](double a, double b) { return smooth_unit(a, b); };
  double f = 0.0;
  for (int k = 0; k < 3; ++k) {
    auto comp = [&](double a, double b) { return d(a, b)[k]; };
    const double di = i == 0 ? (comp(x - 2 * e, y) - 8 * comp(x - e, y) + 8 * comp(x + e, y) - comp(x + 2 * e, y)) / (12 * e)
                             : (comp(x, y - 2 * e) - 8 * comp(x, y - e) + 8 * comp(x, y + e) - comp(x, y + 2 * e)) / (12 * e);
    auto second = [&](auto&& g) {
      return (-g(-2 * q) + 16 * g(-q) - 30 * g(0.0) + 16 * g(q) - g(2 * q)) / (12 * q * q);
    };
    const double lap = second([&](double s) { return comp(x + s, y); }) + second([&](double s) { return comp(x, y + s); });
    f -= lambda * lap * di;
  }
  return f;
}

} // namespace

TEST_CASE("elastic force matches an independent oracle at second order") {
  double err[2];
  for (int level = 0; level < 2; ++level) {
    const Grid g = periodic2(32 << level);
    const DirectorField d = sample_director(g, {0, 0, 1}, [](double x, double y, double) { return smooth_unit(x, y); });
    const VectorField F = elastic_force(d, 2.0, 1e-12);
    double e = 0.0;
    for (int c = 0; c < 2; ++c)
      for_each_face(g, c, [&](int i, int j, int k, std::size_t f) {
        const auto x = g.face_center(c, i, j, k);
        const double o = force_oracle(c, x[0], x[1], 2.0);
        e = std::max(e, std::abs(F.component(c)[f] - o));
      });
    err[level] = e;
  }
  CHECK(err[1] < 0.05);
  CHECK(order(err[0], err[1]) > 1.7);
}

TEST_CASE("elastic force vanishes for constant and circle-map directors") {
  const Grid g = periodic2(32);
  const DirectorField c(g, {0, 0, 1});
  CHECK(elastic_force(c, 1.0).max_abs() == 0.0);
  const DirectorField circle = sample_director(g, {0, 0, 1}, [](double x, double, double) {
    return std::array<double, 3>{std::cos(x), std::sin(x), 0.0};
  });
  CHECK(elastic_force(circle, 1.0).max_abs() < 1e-12);
}

TEST_CASE("elastic force enforces the unit constraint") {
  const Grid g = periodic2(8);
  DirectorField d(g, {0, 0, 1});
  d.set(3, {0, 0, 1.001});
  CHECK_THROWS_AS(elastic_force(d, 1.0, 1e-12), ConstraintError);
}

TEST_CASE("explicit viscosity respects its stability bound") {
  const Grid g = periodic2(16);
  FlowState s(g, {0, 0, 1});
  SolverConfig cfg;
  const double lim = viscous_dt_limit(g, 1.0, cfg.nu);
  CHECK(lim == doctest::Approx(g.spacing(0) * g.spacing(0) / 4.0));
  CHECK_THROWS_AS(momentum_predict(s, cfg, 2.0 * lim), StepSizeError);
  cfg.viscosity = ViscosityMode::Implicit;
  CHECK_NOTHROW(momentum_predict(s, cfg, 2.0 * lim));
}

TEST_CASE("implicit and explicit predictors agree for small steps") {
  std::mt19937_64 rng(40);
  const Grid g = box2(24);
  FlowState s(g, {0, 0, 1});
  random_fill(s.rho.values(), rng, 0.5, 1.5);
  s.u = random_solenoidal(g, rng);
  SolverConfig ex, im;
  im.viscosity = ViscosityMode::Implicit;
  const double dt = 1e-2 * viscous_dt_limit(g, 0.5, 1.0);
  const VectorField a = momentum_predict(s, ex, dt);
  const VectorField b = momentum_predict(s, im, dt);
  double diff = 0.0, change = 0.0;
  for (int c = 0; c < 2; ++c)
    for (std::size_t f = 0; f < a.component(c).size(); ++f) {
      diff = std::max(diff, std::abs(a.component(c)[f] - b.component(c)[f]));
      change = std::max(change, std::abs(a.component(c)[f] - s.u.component(c)[f]));
    }
  CHECK(diff < 0.05 * change);
}

TEST_CASE("constraint identity converges at second order") {
  double r[3];
  for (int level = 0; level < 3; ++level) {
    const Grid g = periodic2(32 << level);
    const DirectorField d = sample_director(g, {0, 0, 1}, [](double x, double y, double) { return smooth_unit(x, y); });
    r[level] = constraint_identity_residual(d);
  }
  for (int i = 0; i < 2; ++i) {
    const double o = order(r[i], r[i + 1]);
    CHECK(o >= 1.8);
    CHECK(o <= 2.2);
  }
}

TEST_CASE("director step preserves the unit norm") {
  const Grid g = box2(32, kTwoPi);
  FlowState s(g, {0, 0, 1});
  s.d = sample_director(g, {0, 0, 1}, [](double x, double y, double) { return smooth_unit(x, y); });
  std::mt19937_64 rng(41);
  s.u = random_solenoidal(g, rng);
  SolverConfig cfg;
  const double dt = 0.5 * std::min(director_dt_limit(g, 1.0), admissible_advection_dt(s.u));
  for (int it = 0; it < 20; ++it) {
    s.d = director_step(s, cfg, dt);
    REQUIRE(s.d.max_unit_violation() <= 1e-14);
  }
  CHECK_THROWS_AS(director_step(s, cfg, 4.0 * director_dt_limit(g, 1.0)), StepSizeError);
}

TEST_CASE("constant director is a bitwise fixed point") {
  const Grid g = box2(16);
  FlowState s(g, {0.6, 0.0, 0.8});
  s.d = DirectorField(g, {0.6, 0.0, 0.8});
  for (std::size_t n = 0; n < s.d.size(); ++n) s.d.set(n, {0.6, 0.0, 0.8});
  std::mt19937_64 rng(42);
  s.u = random_solenoidal(g, rng);
  SolverConfig cfg;
  cfg.d_star = {0.6, 0.0, 0.8};
  const DirectorField next = director_step(s, cfg, 0.5 * director_dt_limit(g, 1.0));
  CHECK(next == s.d);
}

TEST_CASE("collapse of the unnormalized update is a blow-up") {
  const Grid g = periodic2(8);
  FlowState s(g, {0, 0, 1});
  SolverConfig cfg;
  const double dt = 0.5 * director_dt_limit(g, 1.0);
  CellVectorField src(g);
  for (std::size_t n = 0; n < src.size(); ++n) src.set(n, {0, 0, -0.9 / dt});
  CHECK_THROWS_AS(director_step(s, cfg, dt, &src), BlowupError);
}

TEST_CASE("boundary consistency of the constraint identity") {
  const Grid g = box2(16);
  const DirectorField d(g, {0, 0, 1});
  DirectorField u(g, {0, 0, 1});
  for (std::size_t n = 0; n < u.size(); ++n) u.set(n, {0, 0, 1});
  const BoundaryConsistency bc = boundary_consistency(u);
  CHECK(bc.boundary_rms == 0.0);
  CHECK(bc.interior_rms == 0.0);
}

TEST_CASE("solver: equilibrium is bitwise stationary") {
  const Grid g = box2(16);
  FlowState s(g, {0, 0, 1});
  for (std::size_t n = 0; n < s.d.size(); ++n) s.d.set(n, {0, 0, 1});
  const FlowState s0 = s;
  Solver solver(g, {});
  for (int it = 0; it < 10; ++it) solver.step(s, solver.choose_dt(s, 1.0));
  CHECK(s.rho == s0.rho);
  CHECK(s.u == s0.u);
  CHECK(s.d == s0.d);
  CHECK(s.p == s0.p);
  CHECK(s.step == 10);
}

TEST_CASE("solver: blow-up leaves the state untouched") {
  const Grid g = periodic2(16);
  FlowState s = make_initial_state(g, {.profile = "taylor_green"}, {0, 0, 1});
  SolverConfig cfg;
  cfg.blowup_cap = 0.5;
  Solver solver(g, cfg);
  const FlowState before = s;
  CHECK_THROWS_AS(solver.step(s, solver.choose_dt(s, 1.0)), BlowupError);
  CHECK(s == before);
}

TEST_CASE("solver: time step policy") {
  const Grid g = periodic2(16);
  FlowState s = make_initial_state(g, {.profile = "taylor_green"}, {0, 0, 1});
  SolverConfig cfg;
  Solver solver(g, cfg);
  const double adm = solver.admissible_dt(s);
  CHECK(solver.choose_dt(s, 10.0) == doctest::Approx(0.5 * adm));
  CHECK(solver.choose_dt(s, 1e-6) == doctest::Approx(1e-6));
  cfg.dt_policy.adaptive = false;
  cfg.dt_policy.fixed_dt = 1e-4;
  CHECK(Solver(g, cfg).choose_dt(s, 10.0) == 1e-4);
}

TEST_CASE("solver: Taylor-Green decay with frozen director") {
  const Grid g = periodic2(32);
  FlowState s = make_initial_state(g, {.profile = "taylor_green"}, {0, 0, 1});
  SolverConfig cfg;
  cfg.evolve_director = false;
  Solver solver(g, cfg);
  auto kinetic = [&] { return l2_norm(s.u, &s.rho); };
  const double k0 = kinetic() * kinetic();
  while (s.t < 0.25 - 1e-12) solver.step(s, solver.choose_dt(s, 0.25));
  const double k1 = kinetic() * kinetic();
  CHECK(k1 / k0 == doctest::Approx(std::exp(-4.0 * 0.25)).epsilon(0.02));
}
