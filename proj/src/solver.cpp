#include "nematic/solver.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include "nematic/errors.hpp"
#include "nematic/transport.hpp"

namespace nematic {

Solver::Solver(const Grid& grid, SolverConfig cfg)
    : cfg_(std::move(cfg)), projector_(grid, cfg_.preconditioner) {
  cfg_.validate();
}

double Solver::admissible_dt(const FlowState& s) const {
  double dt = std::numeric_limits<double>::infinity();
  const Grid& g = s.grid();
  if (cfg_.evolve_density || cfg_.evolve_director || cfg_.evolve_velocity)
    dt = std::min(dt, admissible_advection_dt(s.u));
  if (cfg_.evolve_director) dt = std::min(dt, director_dt_limit(g, cfg_.gamma));
  if (cfg_.evolve_velocity && cfg_.viscosity == ViscosityMode::Explicit) {
    const VectorField rho_eff = effective_face_density(s.rho, cfg_.rho_floor);
    double rmin = std::numeric_limits<double>::infinity();
    for (int c = 0; c < g.dim(); ++c)
      for (double v : rho_eff.component(c)) rmin = std::min(rmin, v);
    dt = std::min(dt, viscous_dt_limit(g, rmin, cfg_.nu));
  }
  return dt;
}

double Solver::choose_dt(const FlowState& s, double t_end) const {
  const double remaining = t_end - s.t;
  double dt;
  if (cfg_.dt_policy.adaptive) {
    const double adm = admissible_dt(s);
    dt = std::isfinite(adm) ? cfg_.dt_policy.safety * adm : remaining;
  } else {
    dt = cfg_.dt_policy.fixed_dt;
  }
  if (std::isfinite(remaining) && dt > remaining) dt = remaining;
  if (!(dt > 0.0) || !std::isfinite(dt)) throw StepSizeError("no finite positive time step available", dt);
  return dt;
}

namespace {

void check_cap(std::span<const double> v, double cap, const char* name) {
  for (double x : v)
    if (!std::isfinite(x) || std::abs(x) > cap)
      throw BlowupError(std::string("sup-norm of ") + name + " exceeded the blow-up cap", name);
}

} // namespace

StepReport Solver::step(FlowState& s, double dt, const Forcing* forcing) {
  const Grid& g = s.grid();
  StepReport rep;
  rep.dt = dt;

  FlowState next = s;
  if (cfg_.evolve_density) {
    next.rho = advect_density(s.rho, s.u, dt);
    if (forcing) {
      ScalarField src(g);
      forcing->density(s.t, src);
      for (std::size_t n = 0; n < g.cell_count(); ++n) next.rho[n] += dt * src[n];
    }
  }
  if (cfg_.evolve_director) {
    std::optional<CellVectorField> src;
    if (forcing) {
      src.emplace(g);
      forcing->director(s.t, *src);
    }
    next.d = director_step(s, cfg_, dt, src ? &*src : nullptr);
  }
  if (cfg_.evolve_velocity) {
    std::optional<VectorField> src;
    if (forcing) {
      src.emplace(g);
      forcing->momentum(s.t, *src);
    }
    const VectorField u_star = momentum_predict(next, cfg_, dt, src ? &*src : nullptr);
    ProjectionResult pr = projector_.project(u_star, next.rho, cfg_, dt);
    next.u = std::move(pr.velocity);
    for (std::size_t n = 0; n < g.cell_count(); ++n) next.p[n] += pr.pressure[n];
    rep.poisson_iterations = pr.iterations;
    rep.poisson_residual = pr.residual;
    rep.max_divergence = pr.max_divergence;
  }

  check_cap(next.rho.values(), cfg_.blowup_cap, "rho");
  for (int c = 0; c < g.dim(); ++c) check_cap(next.u.component(c), cfg_.blowup_cap, "u");
  check_cap(next.p.values(), cfg_.blowup_cap, "p");
  for (int k = 0; k < 3; ++k) check_cap(next.d.component(k), cfg_.blowup_cap, "d");

  next.t = s.t + dt;
  next.step = s.step + 1;
  s = std::move(next);
  return rep;
}

} // namespace nematic
