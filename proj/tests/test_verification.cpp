#include <doctest.h>

#include "nematic/config.hpp"
#include "nematic/errors.hpp"
#include "nematic/verification.hpp"
#include "support.hpp"

using namespace testing;

namespace {

RunConfig small_run(const std::string& profile, int n, Boundary b) {
  RunConfig c;
  c.grid = Grid::uniform(2, n, kTwoPi, b);
  c.initial.profile = profile;
  return c;
}

} // namespace

TEST_CASE("compatibility: quiescent constant data") {
  const Grid g = box2(16);
  FlowState s(g, {0, 0, 1});
  const CompatibilityReport r = compatibility_residual(s.rho, s.u, s.p, s.d, {});
  CHECK(r.g0_norm == 0.0);
  CHECK(r.violations.empty());
}

TEST_CASE("compatibility: balanced director stress converges") {
  // d = (cos th, sin th, 0) with th = sin x: div(grad d (.) grad d) = 2 th' th'',
  // balanced exactly by p0 = -lambda th'^2.
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    const Grid g = periodic2(n);
    const DirectorField d = sample_director(g, {0, 0, 1}, [](double x, double, double) {
      return std::array<double, 3>{std::cos(std::sin(x)), std::sin(std::sin(x)), 0.0};
    });
    const ScalarField rho(g, 1.0);
    const VectorField u(g);
    const ScalarField p = sample(g, [](double x, double, double) { return -std::cos(x) * std::cos(x); });
    const double r = compatibility_residual(rho, u, p, d, {}).g0_norm;
    CHECK(r < 0.2);
    if (n > 32) CHECK(order(prev, r) > 1.8);
    prev = r;
  }
}

TEST_CASE("compatibility: vacuum cells with forcing are named") {
  const Grid g = periodic2(32);
  ScalarField rho(g, 1.0);
  for (std::size_t n = 0; n < 40; ++n) rho[n] = 0.0;
  const VectorField u(g);
  const ScalarField p = sample(g, [](double x, double, double) { return std::sin(x); });
  const DirectorField d(g, {0, 0, 1});
  const CompatibilityReport r = compatibility_residual(rho, u, p, d, {}, false);
  CHECK_FALSE(r.violations.empty());
  for (std::size_t n : r.violations) CHECK(n < 40);
  CHECK_THROWS_AS(compatibility_residual(rho, u, p, d, {}, true), CompatibilityError);
}

TEST_CASE("MMS contracts") {
  CHECK_THROWS_AS(mms_run({}, {32}), VerificationError);
  CHECK_THROWS_AS(mms_run({}, {32, 16, 64}), VerificationError);
  MmsOptions opt;
  opt.which = MmsCase::Equilibrium;
  opt.horizon = 0.01;
  const MmsTable t = mms_run({}, {8, 16, 32}, opt);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(t.err_rho[i] == 0.0);
    CHECK(t.err_u[i] == 0.0);
    CHECK(t.err_d[i] == 0.0);
  }
}

TEST_CASE("uniqueness distance and Lp norm") {
  const Grid g = periodic2(16);
  const ScalarField one(g, 1.0);
  CHECK(lp_norm(one, 1.5) == doctest::Approx(std::pow(g.volume(), 1.0 / 1.5)));
  const FlowState a = make_initial_state(g, {.profile = "perturbed_circle"}, {0, 0, 1});
  const Distance d0 = uniqueness_distance(a, a);
  CHECK(d0.total() == 0.0);
  FlowState b = a;
  b.rho[3] += 1.0;
  CHECK(uniqueness_distance(a, b).rho > 0.0);
}

TEST_CASE("twin runs") {
  RunConfig c = small_run("perturbed_circle", 24, Boundary::Periodic);
  TwinOptions opt;
  opt.max_steps = 50;
  const TwinResult same = twin_run_divergence(c, opt);
  CHECK(same.bitwise_identical);
  CHECK(same.max_distance == 0.0);
  CHECK(same.steps == 50);

  opt.sigma = 1e-5;
  CHECK_THROWS_AS(twin_run_divergence(c, opt), VerificationError);
  opt.sigma = -1.0;
  CHECK_THROWS_AS(twin_run_divergence(c, opt), VerificationError);

  opt.sigma = 1e-8;
  opt.max_steps = -1;
  opt.horizon = 0.5;
  c.initial.director_amplitude = 0.05;
  const TwinResult small = twin_run_divergence(c, opt);
  CHECK(small.distances.back().total() <= 1e-4);
  CHECK(small.max_distance > 0.0);

  opt.density_only = true;
  opt.horizon = 0.1;
  c.initial.amplitude = 0.2;
  const TwinResult coupled = twin_run_divergence(c, opt);
  CHECK(coupled.distances.back().u > 0.0);
  CHECK(coupled.distances.back().d > 0.0);
}

TEST_CASE("vacuum approximation: identical j gives zero distance") {
  RunConfig c = small_run("vacuum_bump", 24, Boundary::DirichletBox);
  VacuumCompareOptions opt;
  opt.j_list = {100, 100, 1000};
  opt.horizon = 0.01;
  const VacuumCompareTable t = vacuum_approx_compare(c, opt);
  bool found = false;
  for (const VacuumPair& p : t.pairs)
    if (p.j == p.k || (p.j == 100 && p.k == 100)) {
      found = true;
      CHECK(p.sup.total() == 0.0);
    }
  CHECK(found);
}

TEST_CASE("vacuum approximation: smooth density scales linearly in 1/j") {
  RunConfig c = small_run("perturbed_circle", 24, Boundary::Periodic);
  c.initial.amplitude = 0.3;
  VacuumCompareOptions opt;
  opt.j_list = {10, 100, 1000};
  opt.horizon = 0.05;
  const VacuumCompareTable t = vacuum_approx_compare(c, opt);
  double d10 = 0.0, d100 = 0.0;
  for (const VacuumPair& p : t.pairs) {
    if (p.j == 10 && p.k == 1000) d10 = p.sup.u;
    if (p.j == 100 && p.k == 1000) d100 = p.sup.u;
  }
  REQUIRE(d100 > 0.0);
  // |1/10 - 1/1000| / |1/100 - 1/1000| = 11.
  CHECK(d10 / d100 == doctest::Approx(11.0).epsilon(0.1));
}

TEST_CASE("config hash is stable") {
  CHECK(config_hash("abc") == config_hash("abc"));
  CHECK(config_hash("abc") != config_hash("abd"));
}
