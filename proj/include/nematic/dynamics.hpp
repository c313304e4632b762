#pragma once

#include <array>
#include <memory>

#include "nematic/fields.hpp"
#include "nematic/poisson.hpp"
#include "nematic/state.hpp"

namespace nematic {

enum class ViscosityMode { Explicit, Implicit };

struct TimeStepPolicy {
  bool adaptive = true;
  double fixed_dt = 0.0; ///< used when !adaptive
  double safety = 0.5;   ///< fraction of the admissible dt when adaptive
};

/// Physical constants, tolerances and numerical switches of a run.
/// Defaults are the normalized model nu = lambda = gamma = 1.
struct SolverConfig {
  double nu = 1.0;     ///< viscosity
  double lambda = 1.0; ///< elastic coupling
  double gamma = 1.0;  ///< director relaxation
  TimeStepPolicy dt_policy;
  double rho_floor = 0.0; ///< delta in rho_eff = max(rho, delta)
  double unit_tol = 1e-12;
  double div_tol_periodic = 1e-10;
  double div_tol_box = 1e-8;
  double poisson_tol = 1e-10;
  std::array<double, 3> d_star{0.0, 0.0, 1.0};
  double eps0 = 0.05;
  double blowup_cap = 1e6;
  ViscosityMode viscosity = ViscosityMode::Explicit;
  Preconditioner preconditioner = Preconditioner::Spectral;
  bool evolve_density = true;
  bool evolve_velocity = true;
  bool evolve_director = true;
  /// Multiplies the elastic force. Always +1 outside mutation tests.
  double elastic_sign = 1.0;

  /// Throws ConfigError naming the first violated contract.
  void validate() const;
  double div_tol(const Grid& g) const { return g.periodic() ? div_tol_periodic : div_tol_box; }
};

/// Face-sampled -lambda (Laplacian d . grad_i d): the divergence of the
/// elastic stress with its |grad d|^2/2 gradient part moved into the pressure.
/// Wall faces are zero. Throws ConstraintError if |d| deviates from 1 by more
/// than unit_tol.
VectorField elastic_force(const DirectorField& d, double lambda, double unit_tol = 1e-12);

/// Face values of (u . grad) u on the MAC grid (centered differences).
VectorField advection_term(const VectorField& u);

/// max(rho averaged to faces, floor). Throws VacuumError when a face has zero
/// effective density.
VectorField effective_face_density(const ScalarField& rho, double floor);

/// Explicit diffusion bound h^2 rho_min / (2 dim nu).
double viscous_dt_limit(const Grid& g, double rho_min_eff, double nu);

/// Velocity predictor u* with lagged pressure gradient, elastic force and an
/// optional body-force source (per unit volume). Viscosity is explicit or
/// backward Euler per cfg.viscosity. Wall faces of u* are zero.
VectorField momentum_predict(const FlowState& state, const SolverConfig& cfg, double dt,
                             const VectorField* source = nullptr);

struct ProjectionResult {
  VectorField velocity;        ///< u* - dt/rho_eff grad phi
  ScalarField pressure;        ///< phi, the increment to add to the lagged pressure
  int iterations = 0;
  double residual = 0.0;
  double max_divergence = 0.0; ///< ||div u||_inf after projection
};

/// Reusable projection workspace (caches the spectral preconditioner).
class Projector {
public:
  Projector(const Grid& grid, Preconditioner pc);

  /// Solves div(grad phi / rho_eff) = div(u*)/dt and corrects u*.
  /// Throws ConvergenceError when the iteration cap is hit and
  /// CompatibilityError for inconsistent Neumann data.
  ProjectionResult project(const VectorField& u_star, const ScalarField& rho,
                           const SolverConfig& cfg, double dt);

private:
  VariablePoisson poisson_;
};

ProjectionResult pressure_project(const VectorField& u_star, const ScalarField& rho,
                                  const SolverConfig& cfg, double dt);

} // namespace nematic
