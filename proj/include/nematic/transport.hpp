#pragma once

#include "nematic/fields.hpp"

namespace nematic {

/// Bounds 0 <= lower <= upper seeded from the initial density.
struct DensityBounds {
  double lower = 0.0;
  double upper = 0.0;

  static DensityBounds of(const ScalarField& rho0);
};

/// Largest dt for which the limited upwind update keeps the discrete maximum
/// principle: max|u| dt / h <= 1/2 and, per cell, dt * sum_faces |u_f| / h <= 1.
/// Infinite for u = 0.
double admissible_advection_dt(const VectorField& u);

/// One forward-Euler step of rho_t + div(rho u) = 0 with min-mod limited
/// upwind face values, in increment form: the result stays in the range of
/// each cell's neighborhood (so within [min rho, max rho], vacuum stays
/// vacuum) for any u under the CFL bound, and mass changes only by
/// dt * sum(rho div u), i.e. round-off for a projected velocity.
///
/// Throws StepSizeError (carrying the admissible dt) when dt violates the CFL
/// bound, Error when a negative density appears.
ScalarField advect_density(const ScalarField& rho, const VectorField& u, double dt);

} // namespace nematic
