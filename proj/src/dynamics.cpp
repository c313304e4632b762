#include "nematic/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nematic/errors.hpp"
#include "stencil.hpp"

namespace nematic {

using detail::kOutside;

void SolverConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(std::string(name) + " must be positive and finite");
  };
  positive(nu, "nu");
  positive(lambda, "lambda");
  positive(gamma, "gamma");
  positive(unit_tol, "unit_tol");
  positive(div_tol_periodic, "div_tol");
  positive(div_tol_box, "div_tol");
  positive(poisson_tol, "poisson_tol");
  positive(eps0, "eps0");
  positive(blowup_cap, "blowup_cap");
  if (!(rho_floor >= 0.0) || !std::isfinite(rho_floor))
    throw ConfigError("rho_floor must be nonnegative");
  if (dt_policy.adaptive) {
    if (!(dt_policy.safety > 0.0 && dt_policy.safety <= 1.0))
      throw ConfigError("dt safety factor must lie in (0, 1]");
  } else {
    positive(dt_policy.fixed_dt, "dt");
  }
  const double len = std::sqrt(d_star[0] * d_star[0] + d_star[1] * d_star[1] + d_star[2] * d_star[2]);
  if (!(std::abs(len - 1.0) <= 1e-14))
    throw ConfigError("unit-norm contract violated: |d_star| must equal 1");
}

VectorField elastic_force(const DirectorField& d, double lambda, double unit_tol) {
  const double violation = d.max_unit_violation();
  if (!(violation <= unit_tol)) {
    std::ostringstream msg;
    msg << "unit-norm constraint violated: max ||d| - 1| = " << violation;
    throw ConstraintError(msg.str());
  }
  const Grid& g = d.grid();
  const auto grad = discrete_gradient(d);
  const CellVectorField lap = discrete_laplacian(d);
  CellVectorField cell_force(g);
  for (int i = 0; i < g.dim(); ++i) {
    auto dst = cell_force.component(i);
    for (std::size_t n = 0; n < g.cell_count(); ++n) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += lap.component(k)[n] * grad[k].axis[i][n];
      dst[n] = -lambda * s;
    }
  }
  return average_to_faces(cell_force);
}

VectorField advection_term(const VectorField& u) {
  const Grid& g = u.grid();
  VectorField out(g);
  for (int c = 0; c < g.dim(); ++c) {
    const auto uc = u.component(c);
    auto dst = out.component(c);
    for_each_face(g, c, [&](int i, int j, int k, std::size_t f) {
      const std::array<int, 3> pos{i, j, k};
      if (g.is_wall_face(c, pos[c])) {
        dst[f] = 0.0;
        return;
      }
      // Cell positions of the two cells sharing this face.
      std::array<int, 3> plo = pos, phi = pos;
      plo[c] = (pos[c] - 1 + g.cells(c)) % g.cells(c);
      phi[c] = pos[c] % g.cells(c);
      double acc = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        double ua;
        if (a == c) {
          ua = uc[f];
        } else {
          const auto va = u.component(a);
          ua = 0.25 * (va[detail::face_of_cell(g, a, plo, 0)] + va[detail::face_of_cell(g, a, plo, 1)] +
                       va[detail::face_of_cell(g, a, phi, 0)] + va[detail::face_of_cell(g, a, phi, 1)]);
        }
        const auto up = detail::face_neighbor(g, c, pos, a, 1);
        const auto dn = detail::face_neighbor(g, c, pos, a, -1);
        const double vu = up != kOutside ? uc[up] : -uc[f];
        const double vd = dn != kOutside ? uc[dn] : -uc[f];
        acc += ua * (vu - vd) / (2.0 * g.spacing(a));
      }
      dst[f] = acc;
    });
  }
  return out;
}

VectorField effective_face_density(const ScalarField& rho, double floor) {
  VectorField r = average_to_faces(rho);
  const Grid& g = rho.grid();
  for (int c = 0; c < g.dim(); ++c)
    for (double& v : r.component(c)) {
      v = std::max(v, floor);
      if (!(v > 0.0))
        throw VacuumError("vacuum degeneracy: effective density is zero; set a positive rho_floor");
    }
  return r;
}

double viscous_dt_limit(const Grid& g, double rho_min_eff, double nu) {
  const double h = g.min_spacing();
  return h * h * rho_min_eff / (2.0 * g.dim() * nu);
}

namespace {

double min_component(const VectorField& v) {
  double m = std::numeric_limits<double>::infinity();
  for (int c = 0; c < v.grid().dim(); ++c)
    for (double x : v.component(c)) m = std::min(m, x);
  return m;
}

void check_finite(const VectorField& v, const char* what) {
  for (int c = 0; c < v.grid().dim(); ++c)
    for (double x : v.component(c))
      if (!std::isfinite(x)) throw BlowupError(std::string("non-finite ") + what, "u");
}

// Backward-Euler viscous solve (rho/dt - nu Laplacian) x = rhs, one
// component at a time, Jacobi-preconditioned CG. Wall faces stay zero.
void implicit_viscous_solve(const VectorField& rho_eff, double nu, double dt, const VectorField& rhs,
                            VectorField& x, double tol) {
  const Grid& g = rhs.grid();
  for (int c = 0; c < g.dim(); ++c) {
    const auto rc = rho_eff.component(c);
    const std::size_t nf = g.face_count(c);
    std::vector<double> diag(nf, 0.0);
    std::vector<char> wall(nf, 0);
    for_each_face(g, c, [&](int i, int j, int k, std::size_t f) {
      const std::array<int, 3> pos{i, j, k};
      if (g.is_wall_face(c, pos[c])) {
        wall[f] = 1;
        diag[f] = 1.0;
        return;
      }
      double d = rc[f] / dt;
      for (int a = 0; a < g.dim(); ++a) {
        const double inv_h2 = 1.0 / (g.spacing(a) * g.spacing(a));
        d += 2.0 * nu * inv_h2;
        for (int off : {-1, 1})
          if (detail::face_neighbor(g, c, pos, a, off) == kOutside) d += nu * inv_h2;
      }
      diag[f] = d;
    });

    // Off-diagonal couplings (nu/h^2 to each interior neighbor face); wall
    // neighbors hold 0 and ghost neighbors -u, both folded into diag.
    const int slots = 2 * g.dim();
    std::vector<std::size_t> nb(nf * slots, 0);
    std::vector<double> w(nf * slots, 0.0);
    for_each_face(g, c, [&](int i, int j, int k, std::size_t f) {
      if (wall[f]) return;
      const std::array<int, 3> pos{i, j, k};
      for (int a = 0; a < g.dim(); ++a) {
        const double inv_h2 = 1.0 / (g.spacing(a) * g.spacing(a));
        for (int side = 0; side < 2; ++side) {
          const auto other = detail::face_neighbor(g, c, pos, a, side == 0 ? -1 : 1);
          const std::size_t s = f * slots + 2 * a + side;
          nb[s] = f;
          if (other == kOutside || wall[static_cast<std::size_t>(other)]) continue;
          nb[s] = static_cast<std::size_t>(other);
          w[s] = nu * inv_h2;
        }
      }
    });
    LinearOp A = [&](std::span<const double> in, std::span<double> out) {
      for (std::size_t f = 0; f < nf; ++f) {
        double acc = diag[f] * in[f];
        for (int s = 0; s < slots; ++s) acc -= w[f * slots + s] * in[nb[f * slots + s]];
        out[f] = acc;
      }
    };
    LinearOp M = [&](std::span<const double> r, std::span<double> z) {
      for (std::size_t f = 0; f < nf; ++f) z[f] = r[f] / diag[f];
    };
    std::vector<double> b(rhs.component(c).begin(), rhs.component(c).end());
    for (std::size_t f = 0; f < nf; ++f)
      if (wall[f]) b[f] = 0.0;
    auto xc = x.component(c);
    CgOptions opt;
    opt.rel_tol = tol;
    opt.max_iter = 10 * static_cast<int>(nf);
    const CgResult res = conjugate_gradient(A, M, b, xc, opt);
    if (!res.converged)
      throw ConvergenceError("implicit viscous solve did not converge", res.residual, res.iterations);
  }
}

} // namespace

VectorField momentum_predict(const FlowState& state, const SolverConfig& cfg, double dt,
                             const VectorField* source) {
  const Grid& g = state.grid();
  const VectorField rho_eff = effective_face_density(state.rho, cfg.rho_floor);
  if (cfg.viscosity == ViscosityMode::Explicit) {
    const double limit = viscous_dt_limit(g, min_component(rho_eff), cfg.nu);
    if (dt > limit) {
      std::ostringstream msg;
      msg << "explicit viscous limit violated: dt = " << dt << " exceeds " << limit;
      throw StepSizeError(msg.str(), limit);
    }
  }

  const VectorField adv = advection_term(state.u);
  VectorField force = elastic_force(state.d, cfg.lambda, cfg.unit_tol);
  const VectorField grad_p = face_gradient(state.p);

  VectorField u_star(g);
  if (cfg.viscosity == ViscosityMode::Explicit) {
    const VectorField lap = discrete_laplacian(state.u);
    for (int c = 0; c < g.dim(); ++c) {
      const auto u = state.u.component(c);
      auto out = u_star.component(c);
      for (std::size_t f = 0; f < out.size(); ++f) {
        double body = cfg.nu * lap.component(c)[f] + cfg.elastic_sign * force.component(c)[f] -
                      grad_p.component(c)[f];
        if (source) body += source->component(c)[f];
        out[f] = u[f] + dt * (-adv.component(c)[f] + body / rho_eff.component(c)[f]);
      }
    }
  } else {
    VectorField rhs(g);
    for (int c = 0; c < g.dim(); ++c) {
      const auto u = state.u.component(c);
      auto out = rhs.component(c);
      for (std::size_t f = 0; f < out.size(); ++f) {
        const double r = rho_eff.component(c)[f];
        double body = cfg.elastic_sign * force.component(c)[f] - grad_p.component(c)[f];
        if (source) body += source->component(c)[f];
        out[f] = r * (u[f] / dt - adv.component(c)[f]) + body;
      }
    }
    u_star = state.u;
    implicit_viscous_solve(rho_eff, cfg.nu, dt, rhs, u_star, std::min(cfg.poisson_tol, 1e-12));
  }
  u_star.zero_walls();
  check_finite(u_star, "velocity predictor");
  return u_star;
}

Projector::Projector(const Grid& grid, Preconditioner pc) : poisson_(grid, pc) {}

ProjectionResult Projector::project(const VectorField& u_star, const ScalarField& rho,
                                    const SolverConfig& cfg, double dt) {
  const Grid& g = u_star.grid();
  if (!(rho.grid() == g)) throw FieldError("density and velocity grids differ");
  check_finite(u_star, "velocity before projection");
  for (double v : rho.values())
    if (!(v >= 0.0)) throw FieldError("projection requires rho >= 0");

  VectorField beta = effective_face_density(rho, cfg.rho_floor);
  for (int c = 0; c < g.dim(); ++c)
    for (double& v : beta.component(c)) v = 1.0 / v;

  ScalarField rhs = discrete_divergence(u_star);
  for (double& v : rhs.values()) v /= dt;
  double flux_scale = 0.0;
  for (int c = 0; c < g.dim(); ++c)
    for (double v : u_star.component(c)) flux_scale += 2.0 * std::abs(v) / g.spacing(c);

  const double div_tol = cfg.div_tol(g);
  CgOptions opt;
  opt.rel_tol = cfg.poisson_tol;
  // Aim well below the contract so the density update sees round-off only.
  opt.abs_tol_inf = 1e-2 * div_tol / dt;
  opt.max_iter = static_cast<int>(
      10.0 * std::pow(static_cast<double>(g.cell_count()), 1.0 / g.dim()) * g.dim());
  opt.rhs_scale = flux_scale / dt;

  ProjectionResult res{u_star, ScalarField(g), 0, 0.0, 0.0};
  const CgResult cg = poisson_.solve(beta, rhs.values(), res.pressure.values(), opt);
  res.iterations = cg.iterations;
  res.residual = cg.residual;
  if (!cg.converged) {
    std::ostringstream msg;
    msg << "pressure Poisson solve hit the iteration cap (" << cg.iterations
        << ") with residual " << cg.residual;
    throw ConvergenceError(msg.str(), cg.residual, cg.iterations);
  }

  const VectorField grad_phi = face_gradient(res.pressure);
  for (int c = 0; c < g.dim(); ++c) {
    auto u = res.velocity.component(c);
    for (std::size_t f = 0; f < u.size(); ++f)
      u[f] -= dt * beta.component(c)[f] * grad_phi.component(c)[f];
  }
  res.velocity.zero_walls();
  const ScalarField div = discrete_divergence(res.velocity);
  for (double v : div.values()) res.max_divergence = std::max(res.max_divergence, std::abs(v));
  return res;
}

ProjectionResult pressure_project(const VectorField& u_star, const ScalarField& rho,
                                  const SolverConfig& cfg, double dt) {
  Projector p(u_star.grid(), cfg.preconditioner);
  return p.project(u_star, rho, cfg, dt);
}

} // namespace nematic
