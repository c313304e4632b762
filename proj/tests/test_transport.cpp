#include <doctest.h>

#include "nematic/errors.hpp"
#include "nematic/transport.hpp"
#include "support.hpp"

using namespace testing;

TEST_CASE("constant density is a bitwise fixed point") {
  std::mt19937_64 rng(10);
  for (const Grid& g : {periodic2(16), box2(16)}) {
    const ScalarField rho(g, 0.7);
    const VectorField u = random_solenoidal(g, rng);
    const ScalarField out = advect_density(rho, u, 0.5 * admissible_advection_dt(u));
    CHECK(out == rho);
  }
}

TEST_CASE("zero velocity leaves density untouched") {
  const Grid g = box2(8);
  std::mt19937_64 rng(11);
  ScalarField rho(g);
  random_fill(rho.values(), rng, 0.0, 1.0);
  CHECK(std::isinf(admissible_advection_dt(VectorField(g))));
  CHECK(advect_density(rho, VectorField(g), 1.0) == rho);
}

TEST_CASE("mass and bounds over random solenoidal flows") {
  for (std::uint64_t seed = 20; seed < 28; ++seed) {
    std::mt19937_64 rng(seed);
    const Grid g = seed % 2 ? periodic2(24) : box2(24);
    ScalarField rho(g);
    random_fill(rho.values(), rng, 0.0, 3.0);
    const VectorField u = random_solenoidal(g, rng, 2.0);
    const DensityBounds b = DensityBounds::of(rho);
    const double m0 = rho.sum();
    const double dt = admissible_advection_dt(u);
    for (int it = 0; it < 100; ++it) {
      rho = advect_density(rho, u, dt);
      REQUIRE(rho.min() >= b.lower - 1e-12);
      REQUIRE(rho.max() <= b.upper + 1e-12);
      REQUIRE(std::abs(rho.sum() - m0) <= 1e-12 * m0);
    }
  }
}

TEST_CASE("vacuum cells away from inflow stay exactly zero") {
  const Grid g = periodic2(32);
  ScalarField rho = sample(g, [](double x, double, double) { return x < 2.0 ? 1.0 : 0.0; });
  VectorField u(g);
  for (double& v : u.component(0)) v = 1.0; // uniform flow in +x
  const double dt = 0.5 * admissible_advection_dt(u);
  for (int it = 0; it < 4; ++it) rho = advect_density(rho, u, dt);
  for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
    if (g.center(i, j, k)[0] > 3.0) CHECK(rho[n] == 0.0);
    CHECK(rho[n] >= 0.0);
  });
}

TEST_CASE("oversized step reports the admissible dt") {
  std::mt19937_64 rng(12);
  const Grid g = periodic2(16);
  const VectorField u = random_solenoidal(g, rng);
  const double adm = admissible_advection_dt(u);
  try {
    advect_density(ScalarField(g, 1.0), u, 2.0 * adm);
    FAIL("expected StepSizeError");
  } catch (const StepSizeError& e) {
    CHECK(e.admissible_dt == adm);
  }
}

TEST_CASE("smooth translation converges at least at first order") {
  // Uniform flow along x carries a smooth profile once around the domain.
  double err[3];
  for (int level = 0; level < 3; ++level) {
    const Grid g = periodic2(32 << level);
    auto f = [](double x, double y, double) { return 1.0 + 0.5 * std::sin(x) * std::cos(y); };
    ScalarField rho = sample(g, f);
    const ScalarField exact = rho;
    VectorField u(g);
    for (double& v : u.component(0)) v = 1.0;
    const int steps = 4 * g.cells(0);
    const double dt = kTwoPi / steps;
    for (int it = 0; it < steps; ++it) rho = advect_density(rho, u, dt);
    double e = 0.0;
    for (std::size_t n = 0; n < rho.size(); ++n) e += (rho[n] - exact[n]) * (rho[n] - exact[n]);
    err[level] = std::sqrt(e * g.cell_volume());
  }
  const double o1 = order(err[0], err[1]), o2 = order(err[1], err[2]);
  CHECK(o1 > 0.9);
  CHECK(o2 > 0.9);
  CHECK(o2 < 2.2);
}
