#include <doctest.h>

#include "nematic/config.hpp"
#include "nematic/errors.hpp"

using namespace nematic;

TEST_CASE("defaults normalize the constants") {
  const RunConfig c = parse_config("[initial]\nprofile = equilibrium\n[run]\nsteps = 10\n");
  CHECK(c.solver.nu == 1.0);
  CHECK(c.solver.lambda == 1.0);
  CHECK(c.solver.gamma == 1.0);
  CHECK(c.run.max_steps == 10);
  CHECK(c.grid.periodic());
}

TEST_CASE("resolved INI round-trips") {
  const RunConfig c = parse_config(
      "[grid]\ndim = 2\ncells = 48\nlength = 3.5\nboundary = dirichlet_box\n"
      "[physics]\nnu = 0.1\nlambda = 0.3\ngamma = 0.7\nd_star = 0.6,0,0.8\n"
      "[initial]\nprofile = vacuum_bump\namplitude = 0.123456789\n"
      "[run]\nt_end = 0.3\ndt = 1e-4\nsnapshot_every = 7\n");
  const std::string text = to_ini(c);
  const RunConfig r = parse_config(text);
  CHECK(to_ini(r) == text);
  CHECK(r.solver.nu == 0.1);
  CHECK(r.solver.d_star[0] == 0.6);
  CHECK(r.grid.cells(0) == 48);
  CHECK_FALSE(r.solver.dt_policy.adaptive);
  CHECK(r.solver.dt_policy.fixed_dt == 1e-4);
  CHECK(r.initial.amplitude.value() == 0.123456789);
  CHECK(r.solver.viscosity == ViscosityMode::Implicit);
}

TEST_CASE("invalid configurations name their contract") {
  CHECK_THROWS_AS(parse_config("[run]\nsteps = 1\nbogus = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[extra]\na = 1\n[run]\nsteps = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[physics]\nnu = -1\n[run]\nsteps = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[initial]\nprofile = nope\n[run]\nsteps = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\ncells = 0\n[run]\nsteps = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[grid]\ncells = 8\n"), ConfigError);
  try {
    parse_config("[physics]\nd_star = 0,0,2\n[run]\nsteps = 1\n");
    FAIL("expected rejection");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("unit-norm") != std::string::npos);
  }
}
