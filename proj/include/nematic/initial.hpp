#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nematic/state.hpp"

namespace nematic {

/// Named initial data with its scalar parameters. Unset amplitudes take the
/// profile's default (see resolve()).
struct InitialSpec {
  std::string profile = "equilibrium";
  std::optional<double> amplitude;          ///< velocity amplitude
  std::optional<double> director_amplitude; ///< director perturbation amplitude
  double rho_level = 1.0;                   ///< density level (rho bar)
  double noise = 0.0;                       ///< seeded low-mode director noise
  std::uint64_t seed = 1;

  /// Copy with the profile defaults filled in.
  InitialSpec resolve() const;
};

/// equilibrium, circle_map, perturbed_circle, taylor_green, vacuum_bump.
const std::vector<std::string>& catalogue();

/// Builds (rho0, u0, p0 = 0, d0). Throws ConfigError for unknown profiles or
/// profiles that need a periodic grid.
FlowState make_initial_state(const Grid& grid, const InitialSpec& spec,
                             const std::array<double, 3>& d_star);

/// MAC velocity (d_y psi, -d_x psi, 0) from a stream function sampled on the
/// z-directed cell edges; discretely divergence-free up to round-off.
void velocity_from_stream_function(VectorField& u,
                                   const std::function<double(double, double, double)>& psi);

/// Smooth 0 -> 1 ramp on [0, 1] (C^2 quintic), clamped outside.
double smooth_ramp(double s);

} // namespace nematic
