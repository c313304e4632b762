#pragma once

#include "nematic/dynamics.hpp"

namespace nematic {

/// gamma (Laplacian d + |grad d|^2 d) - (u . grad) d at cell centers, with u
/// averaged to centers and the transport term upwinded (second order where the
/// stencil fits, first order against a wall). Throws ConstraintError if |d|
/// deviates from 1 by more than cfg.unit_tol.
CellVectorField director_rhs(const FlowState& state, const SolverConfig& cfg);

/// Explicit diffusion bound h^2 / (4 gamma dim).
double director_dt_limit(const Grid& g, double gamma);

/// Forward-Euler step of the director followed by pointwise renormalization.
/// `source`, if given, is added to the right-hand side. Cells whose increment
/// is exactly zero are left untouched, so equilibria are bitwise fixed points.
///
/// Throws StepSizeError above the diffusion or advective bound, BlowupError
/// when the unnormalized update is non-finite or shorter than 1/2.
DirectorField director_step(const FlowState& state, const SolverConfig& cfg, double dt,
                            const CellVectorField* source = nullptr);

/// ||Laplacian d . d + |grad d|^2||_2, zero for exact unit maps.
double constraint_identity_residual(const DirectorField& d);

struct BoundaryConsistency {
  double boundary_rms = 0.0; ///< rms of |Laplacian d + |grad d|^2 d| over wall-adjacent cells
  double interior_rms = 0.0; ///< same over the remaining cells
};

/// Discrete check of Laplacian d = -|grad d|^2 d at the boundary of a
/// DirichletBox (both numbers are over interior cells on periodic grids).
BoundaryConsistency boundary_consistency(const DirectorField& d);

} // namespace nematic
