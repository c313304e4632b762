#include <doctest.h>

#include "nematic/diagnostics.hpp"
#include "nematic/errors.hpp"
#include "nematic/verification.hpp"
#include "support.hpp"

using namespace testing;

TEST_CASE("catalogue profiles produce valid initial data") {
  for (const std::string& name : catalogue()) {
    const Grid g = name == "vacuum_bump" || name == "equilibrium" ? box2(32, kTwoPi) : periodic2(32);
    const FlowState s = make_initial_state(g, {.profile = name}, {0, 0, 1});
    CAPTURE(name);
    CHECK(s.rho.min() >= 0.0);
    CHECK(s.d.max_unit_violation() <= 1e-15);
    CHECK(discrete_divergence(s.u).values().size() == g.cell_count());
    double div = 0.0;
    for (double v : discrete_divergence(s.u).values()) div = std::max(div, std::abs(v));
    CHECK(div < 1e-12);
    SolverConfig cfg;
    cfg.rho_floor = 1e-3;
    CHECK_NOTHROW(compatibility_residual(s, cfg));
  }
}

TEST_CASE("vacuum bump touches zero and is quiescent there") {
  const Grid g = box2(48, kTwoPi);
  const FlowState s = make_initial_state(g, {.profile = "vacuum_bump"}, {0, 0, 1});
  CHECK(s.rho.min() == 0.0);
  CHECK(s.rho.max() == doctest::Approx(1.0));
  for (std::size_t n = 0; n < s.rho.size(); ++n)
    if (s.rho[n] == 0.0) CHECK(s.d.at(n) == std::array<double, 3>{0, 0, 1});
}

TEST_CASE("periodic-only profiles refuse boxes") {
  for (const char* name : {"circle_map", "perturbed_circle", "taylor_green"})
    CHECK_THROWS_AS(make_initial_state(box2(16), {.profile = name}, {0, 0, 1}), ConfigError);
  CHECK_THROWS_AS(make_initial_state(periodic2(16), {.profile = "unknown"}, {0, 0, 1}), ConfigError);
}

TEST_CASE("amplitude zero gives vanishing basic energy") {
  InitialSpec spec{.profile = "perturbed_circle", .amplitude = 0.0, .director_amplitude = 0.0};
  const FlowState s = make_initial_state(periodic2(32), spec, {0, 0, 1});
  CHECK(basic_energy(s).kinetic == 0.0);
  CHECK(basic_energy(s).elastic > 0.0);
}

TEST_CASE("seeded noise is reproducible") {
  InitialSpec spec{.profile = "equilibrium", .noise = 0.05, .seed = 9};
  const FlowState a = make_initial_state(periodic2(16), spec, {0, 0, 1});
  const FlowState b = make_initial_state(periodic2(16), spec, {0, 0, 1});
  CHECK(a == b);
  spec.seed = 10;
  CHECK_FALSE(a == make_initial_state(periodic2(16), spec, {0, 0, 1}));
}

TEST_CASE("smooth ramp") {
  CHECK(smooth_ramp(-1.0) == 0.0);
  CHECK(smooth_ramp(0.0) == 0.0);
  CHECK(smooth_ramp(0.5) == doctest::Approx(0.5));
  CHECK(smooth_ramp(1.0) == 1.0);
  CHECK(smooth_ramp(3.0) == 1.0);
}
