#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nematic/dynamics.hpp"
#include "nematic/state.hpp"
#include "nematic/transport.hpp"

namespace nematic {

struct BasicEnergy {
  double kinetic = 0.0; ///< ||sqrt(rho) u||_2^2
  double elastic = 0.0; ///< ||grad d||_2^2
};

BasicEnergy basic_energy(const FlowState& s);

/// The dissipation side of the energy law at one time.
struct DissipationTerms {
  double grad_u = 0.0;  ///< ||grad u||_2^2
  double lap_d = 0.0;   ///< ||Laplacian d||_2^2
  double quartic = 0.0; ///< ||grad d||_4^4
};

DissipationTerms dissipation_terms(const FlowState& s);

/// Residual of the discrete energy law between consecutive states:
///   [E_b(next) - E_b(prev)]/dt + 2 nu ||grad u||^2 + 2 lambda gamma (||Lap d||^2 - ||grad d||_4^4)
/// with E_b = kinetic + lambda * elastic and the dissipation averaged over the
/// two states. Signed.
double energy_identity_residual(const FlowState& prev, const FlowState& next, double dt,
                                const SolverConfig& cfg = {});

/// Discrete Hessian norm sum_{a,b} ||d_a d_b f||_2^2.
double hessian_norm_sq(const ScalarField& f);

/// Squared norms entering the a priori functionals at one time. Time
/// derivatives are empty until enough snapshots exist.
struct LedgerSample {
  double u_sq = 0.0;     ///< ||u||_2^2
  double grad_u = 0.0;   ///< ||grad u||_2^2
  double hess_u = 0.0;   ///< ||grad^2 u||_2^2
  double grad_d = 0.0;   ///< ||grad d||_2^2
  double lap_d = 0.0;    ///< ||Laplacian d||_2^2
  double hess_d = 0.0;   ///< ||grad^2 d||_2^2
  double grad3_d = 0.0;  ///< ||grad Laplacian d||_2^2
  double grad_p = 0.0;   ///< ||grad p||_2^2
  double grad_rho = 0.0; ///< ||grad rho||_2^2
  std::optional<double> sqrt_rho_ut; ///< ||sqrt(rho) u_t||_2^2
  std::optional<double> rho_t;       ///< ||rho_t||_2^2
  std::optional<double> grad_ut;     ///< ||grad u_t||_2^2
  std::optional<double> hess_dt;     ///< ||grad^2 d_t||_2^2
  std::optional<double> d_tt;        ///< ||d_tt||_2^2
};

/// Running sups and trapezoid time integrals realizing C0, E1(t), E2(t) and
/// E(t). Feed it every accepted state in order.
class EnergyLedger {
public:
  struct Sups {
    double grad_u = 0, hess_d = 0, sqrt_rho_ut = 0, hess_u = 0, grad_p = 0, grad3_d = 0,
           grad_rho = 0, rho_t = 0;
  };
  struct Integrals {
    double grad_u = 0, lap_d = 0, sqrt_rho_ut = 0, hess_u = 0, grad_p = 0, grad3_d = 0,
           grad_ut = 0, d_tt = 0, hess_dt = 0;
  };

  /// Folds in `s`, reached `dt` after the previous update (dt ignored on the
  /// first call).
  void update(const FlowState& s, double dt);

  double c0() const noexcept { return c0_; }
  double time() const noexcept { return time_; }
  int updates() const noexcept { return updates_; }
  const Sups& sups() const noexcept { return sup_; }
  const Integrals& integrals() const noexcept { return int_; }
  const LedgerSample& last_sample() const noexcept { return last_; }

  /// sup(||grad u||^2 + ||grad^2 d||^2) + int(||sqrt(rho) u_t||^2 + ||grad^2 u||^2
  /// + ||grad p||^2 + ||grad^3 d||^2)
  double e1() const noexcept;
  /// sup(||sqrt(rho) u_t||^2 + ||grad^2 u||^2 + ||grad p||^2 + ||grad^3 d||^2)
  /// + int(||grad u_t||^2 + ||d_tt||^2 + ||grad^2 d_t||^2)
  double e2() const noexcept;
  /// sup(||grad rho||^2 + ||rho_t||^2 + ||u||_H2^2 + ||grad d||_H2^2 + ||grad p||^2)
  /// + int(||grad u_t||^2 + ||grad^2 d_t||^2)
  double e_total() const noexcept;

  /// False until the first-derivative (resp. d_tt) terms have been evaluated.
  bool first_derivatives_available() const noexcept { return have_first_; }
  bool second_derivatives_available() const noexcept { return have_second_; }

private:
  LedgerSample sample(const FlowState& s, double dt) const;

  double c0_ = 0.0;
  double time_ = 0.0;
  int updates_ = 0;
  bool have_first_ = false;
  bool have_second_ = false;
  Sups sup_;
  Integrals int_;
  double sup_e1_ = 0.0, sup_e2_ = 0.0, sup_e_ = 0.0;
  LedgerSample last_;
  std::optional<FlowState> prev_;
  std::optional<FlowState> prev2_;
  double prev_dt_ = 0.0;
};

EnergyLedger update_ledger(EnergyLedger ledger, const FlowState& s, double dt);

enum class Smallness { SatisfiedN2, SatisfiedN3, NotSatisfied };
std::string to_string(Smallness s);

/// N = 2: c0 < eps0. N = 3: c0 * h1_level < eps0. Strict inequalities.
Smallness smallness_check(double c0, double h1_level, int dim, double eps0);

/// ||grad u0||^2 + ||grad^2 d0||^2.
double h1_level(const FlowState& s);

struct InvariantReport {
  double mass = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double max_div_u = 0.0;
  double max_unit_violation = 0.0;
  bool blowup_flag = false;
  std::string offending_field; ///< set with blowup_flag
  bool within_tolerances = true;
  std::vector<std::string> violations;
};

/// Mass, density bounds, divergence and unit-norm residuals; raises the
/// blow-up flag on non-finite entries or sup-norms above cfg.blowup_cap.
InvariantReport invariant_report(const FlowState& s, const DensityBounds& bounds,
                                 const SolverConfig& cfg);

/// One row of the diagnostics stream.
struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double kinetic = 0.0;
  double elastic = 0.0;
  double dissipation_u = 0.0;
  double dissipation_d = 0.0;
  double quartic = 0.0;
  double energy_identity_residual = 0.0;
  double max_div_u = 0.0;
  double max_unit_violation = 0.0;
  double E1 = 0.0;
  double E2 = 0.0;
  bool blowup_flag = false;
};

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const DiagnosticsRecord& r);

} // namespace nematic
