#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>

#include "nematic/dynamics.hpp"
#include "nematic/grid.hpp"
#include "nematic/initial.hpp"

namespace nematic {

struct RunControl {
  double t_end = std::numeric_limits<double>::infinity();
  std::int64_t max_steps = -1; ///< negative: unbounded
  std::int64_t snapshot_every = 50;
  bool reject_incompatible = true; ///< false: warn only
};

/// Everything a run needs. `rho_floor_auto` resolves the floor from the
/// initial density (1e-3 * max rho0 when rho0 touches zero, else 0).
struct RunConfig {
  Grid grid = Grid::uniform(2, 32, 6.283185307179586, Boundary::Periodic);
  SolverConfig solver;
  bool rho_floor_auto = true;
  InitialSpec initial;
  RunControl run;
};

/// Parses INI text with sections [grid], [physics], [initial], [run].
/// Throws ConfigError on syntax errors, unknown keys or invalid values.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Fully resolved INI; parse_config(to_ini(c)) reproduces c exactly.
std::string to_ini(const RunConfig& c);

/// Floor actually used for the given initial density.
double resolved_rho_floor(const RunConfig& c, const ScalarField& rho0);

} // namespace nematic
