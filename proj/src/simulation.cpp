#include "nematic/simulation.hpp"

#include <cmath>

#include "nematic/errors.hpp"
#include "nematic/verification.hpp"

namespace nematic {

namespace {

RunConfig with_floor(RunConfig c, const FlowState& s) {
  c.solver.rho_floor = resolved_rho_floor(c, s.rho);
  c.rho_floor_auto = false;
  return c;
}

} // namespace

Simulation::Simulation(const RunConfig& cfg, SimulationOptions opt)
    : Simulation(cfg, make_initial_state(cfg.grid, cfg.initial, cfg.solver.d_star), opt) {}

Simulation::Simulation(const RunConfig& cfg, FlowState initial, SimulationOptions opt)
    : cfg_(with_floor(cfg, initial)), state_(std::move(initial)),
      solver_(state_.grid(), cfg_.solver) {
  init(opt);
}

void Simulation::init(SimulationOptions opt) {
  if (!(state_.grid() == cfg_.grid)) throw ConfigError("initial state does not live on the configured grid");
  if (state_.d.max_unit_violation() > cfg_.solver.unit_tol)
    throw ConstraintError("initial director violates |d| = 1");
  track_ledger_ = opt.track_ledger;
  bounds_ = DensityBounds::of(state_.rho);
  if (opt.check_compatibility) {
    const CompatibilityReport rep =
        compatibility_residual(state_, cfg_.solver, cfg_.run.reject_incompatible);
    compat_ = rep.violations;
  }
  if (track_ledger_) ledger_.update(state_, 0.0);
  records_.push_back(record(false, 0.0));
}

bool Simulation::finished() const {
  if (cfg_.run.max_steps >= 0 && state_.step >= cfg_.run.max_steps) return true;
  const double t_end = cfg_.run.t_end;
  return std::isfinite(t_end) && t_end - state_.t <= 1e-12 * std::max(1.0, std::abs(t_end));
}

double Simulation::next_dt() const { return solver_.choose_dt(state_, cfg_.run.t_end); }

const DiagnosticsRecord& Simulation::advance() { return advance(next_dt()); }

const DiagnosticsRecord& Simulation::advance(double dt) {
  last_step_ = solver_.step(state_, dt);
  if (track_ledger_) ledger_.update(state_, dt);
  records_.push_back(record(true, dt));
  return records_.back();
}

DiagnosticsRecord Simulation::record(bool has_prev, double dt) const {
  DiagnosticsRecord r;
  const InvariantReport inv = invariant_report(state_, bounds_, cfg_.solver);
  r.t = state_.t;
  r.mass = inv.mass;
  r.min_rho = inv.min_rho;
  r.max_rho = inv.max_rho;
  r.max_div_u = inv.max_div_u;
  r.max_unit_violation = inv.max_unit_violation;
  r.blowup_flag = inv.blowup_flag;
  const BasicEnergy e = basic_energy(state_);
  r.kinetic = e.kinetic;
  r.elastic = e.elastic;
  const DissipationTerms d = dissipation_terms(state_);
  r.dissipation_u = d.grad_u;
  r.dissipation_d = d.lap_d;
  r.quartic = d.quartic;
  if (has_prev) {
    // Same quantity as energy_identity_residual(), reusing the previous row.
    const DiagnosticsRecord& p = records_.back();
    const SolverConfig& c = cfg_.solver;
    auto rate = [&](double gu, double ld, double q) {
      return 2.0 * c.nu * gu + 2.0 * c.lambda * c.gamma * (ld - q);
    };
    const double e0 = p.kinetic + c.lambda * p.elastic;
    const double e1 = r.kinetic + c.lambda * r.elastic;
    r.energy_identity_residual =
        (e1 - e0) / dt + 0.5 * (rate(p.dissipation_u, p.dissipation_d, p.quartic) +
                                rate(r.dissipation_u, r.dissipation_d, r.quartic));
  }
  if (track_ledger_) {
    r.E1 = ledger_.e1();
    r.E2 = ledger_.e2();
  }
  return r;
}

} // namespace nematic
