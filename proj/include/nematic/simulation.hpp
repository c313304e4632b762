#pragma once

#include <optional>
#include <vector>

#include "nematic/config.hpp"
#include "nematic/diagnostics.hpp"
#include "nematic/solver.hpp"

namespace nematic {

struct SimulationOptions {
  bool track_ledger = true;
  /// Evaluate the compatibility condition on the initial data; rejection or
  /// warning follows RunControl::reject_incompatible.
  bool check_compatibility = true;
};

/// A run in progress: solver, state, invariant bounds, ledger and the
/// diagnostics stream (the initial record at t = 0 plus one per step).
class Simulation {
public:
  explicit Simulation(const RunConfig& cfg, SimulationOptions opt = {});
  /// Starts from the given state instead of the catalogue profile.
  Simulation(const RunConfig& cfg, FlowState initial, SimulationOptions opt = {});

  /// The configuration with rho_floor resolved.
  const RunConfig& config() const noexcept { return cfg_; }
  const FlowState& state() const noexcept { return state_; }
  const EnergyLedger& ledger() const noexcept { return ledger_; }
  const DensityBounds& bounds() const noexcept { return bounds_; }
  const std::vector<DiagnosticsRecord>& records() const noexcept { return records_; }
  const StepReport& last_step() const noexcept { return last_step_; }
  /// Cells flagged by the compatibility check (warn mode only).
  const std::vector<std::size_t>& compatibility_warnings() const noexcept { return compat_; }

  /// True once t_end or the step limit is reached.
  bool finished() const;
  /// Time step the configured policy would take next.
  double next_dt() const;

  /// One step with the policy's dt (or the given dt). Throws BlowupError and
  /// leaves the state untouched when the step leaves the resolvable regime.
  const DiagnosticsRecord& advance();
  const DiagnosticsRecord& advance(double dt);

private:
  void init(SimulationOptions opt);
  DiagnosticsRecord record(bool has_prev, double dt) const;

  RunConfig cfg_;
  FlowState state_;
  Solver solver_;
  DensityBounds bounds_;
  EnergyLedger ledger_;
  bool track_ledger_ = true;
  StepReport last_step_;
  std::vector<DiagnosticsRecord> records_;
  std::vector<std::size_t> compat_;
};

} // namespace nematic
