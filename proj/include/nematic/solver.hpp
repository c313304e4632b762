#pragma once

#include "nematic/director.hpp"
#include "nematic/dynamics.hpp"
#include "nematic/state.hpp"

namespace nematic {

/// Source terms added to the three evolution equations, evaluated at the start
/// of each step (used by manufactured-solution runs).
class Forcing {
public:
  virtual ~Forcing() = default;
  /// Added to rho_t + div(rho u).
  virtual void density(double t, ScalarField& out) const = 0;
  /// Body force per unit volume added to the momentum balance, on faces.
  virtual void momentum(double t, VectorField& out) const = 0;
  /// Added to the director equation.
  virtual void director(double t, CellVectorField& out) const = 0;
};

struct StepReport {
  double dt = 0.0;
  int poisson_iterations = 0;
  double poisson_residual = 0.0;
  double max_divergence = 0.0;
};

/// Coupled time stepper. One step runs, in order: density transport with the
/// old velocity, the director update with the old velocity, then the momentum
/// predictor with the new density and director followed by the projection.
class Solver {
public:
  Solver(const Grid& grid, SolverConfig cfg);

  const SolverConfig& config() const noexcept { return cfg_; }

  /// Smallest stability bound of the enabled sub-steps (may be infinite).
  double admissible_dt(const FlowState& s) const;
  /// dt from the configured policy, clamped so t never passes t_end.
  double choose_dt(const FlowState& s, double t_end) const;

  /// Advances `s` by dt. Throws BlowupError when a sup-norm exceeds
  /// cfg.blowup_cap or becomes non-finite; `s` is left unchanged on throw.
  StepReport step(FlowState& s, double dt, const Forcing* forcing = nullptr);

private:
  SolverConfig cfg_;
  Projector projector_;
};

} // namespace nematic
