#include "nematic/director.hpp"

#include <cmath>
#include <sstream>

#include "nematic/errors.hpp"
#include "nematic/transport.hpp"
#include "stencil.hpp"

namespace nematic {

using detail::kOutside;

namespace {

void check_unit(const DirectorField& d, double tol) {
  const double violation = d.max_unit_violation();
  if (!(violation <= tol)) {
    std::ostringstream msg;
    msg << "unit-norm constraint violated: max ||d| - 1| = " << violation;
    throw ConstraintError(msg.str());
  }
}

// Upwind derivative of component values f along axis a at cell pos.
double upwind_derivative(const Grid& g, std::span<const double> f, double ghost,
                         const std::array<int, 3>& pos, std::size_t n, int a, double vel) {
  const int dir = vel > 0.0 ? -1 : 1;
  const double h = g.spacing(a);
  const auto n1 = detail::cell_neighbor(g, pos, a, dir);
  const auto n2 = detail::cell_neighbor(g, pos, a, 2 * dir);
  double diff;
  if (n1 == kOutside) {
    diff = (f[n] - ghost) / h;
  } else if (n2 == kOutside) {
    diff = (f[n] - f[n1]) / h;
  } else {
    diff = (3.0 * f[n] - 4.0 * f[n1] + f[n2]) / (2.0 * h);
  }
  return dir < 0 ? diff : -diff;
}

} // namespace

CellVectorField director_rhs(const FlowState& state, const SolverConfig& cfg) {
  const DirectorField& d = state.d;
  check_unit(d, cfg.unit_tol);
  const Grid& g = d.grid();
  const auto grad = discrete_gradient(d);
  const CellVectorField lap = discrete_laplacian(d);
  const CellVectorField uc = state.u.centered();

  CellVectorField rhs(g);
  for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
    const std::array<int, 3> pos{i, j, k};
    double grad_sq = 0.0;
    for (int m = 0; m < 3; ++m)
      for (int a = 0; a < g.dim(); ++a) grad_sq += grad[m].axis[a][n] * grad[m].axis[a][n];
    for (int m = 0; m < 3; ++m) {
      const auto dm = d.component(m);
      double transport = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        const double va = uc.component(a)[n];
        if (va == 0.0) continue;
        transport += va * upwind_derivative(g, dm, d.boundary_value()[m], pos, n, a, va);
      }
      rhs.component(m)[n] = cfg.gamma * (lap.component(m)[n] + grad_sq * dm[n]) - transport;
    }
  });
  return rhs;
}

double director_dt_limit(const Grid& g, double gamma) {
  const double h = g.min_spacing();
  return h * h / (4.0 * gamma * g.dim());
}

DirectorField director_step(const FlowState& state, const SolverConfig& cfg, double dt,
                            const CellVectorField* source) {
  const Grid& g = state.grid();
  const double limit = std::min(director_dt_limit(g, cfg.gamma), admissible_advection_dt(state.u));
  if (dt > limit) {
    std::ostringstream msg;
    msg << "director step dt = " << dt << " exceeds the explicit limit " << limit;
    throw StepSizeError(msg.str(), limit);
  }
  const CellVectorField rhs = director_rhs(state, cfg);
  DirectorField out = state.d;
  for (std::size_t n = 0; n < g.cell_count(); ++n) {
    std::array<double, 3> inc{};
    bool moved = false;
    for (int m = 0; m < 3; ++m) {
      double r = rhs.component(m)[n];
      if (source) r += source->component(m)[n];
      inc[m] = dt * r;
      moved = moved || inc[m] != 0.0;
    }
    if (!moved) continue;
    auto v = state.d.at(n);
    for (int m = 0; m < 3; ++m) v[m] += inc[m];
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!std::isfinite(len)) throw BlowupError("director update is non-finite", "d");
    if (len < 0.5) throw BlowupError("director update left the renormalization regime (|d| < 1/2)", "d");
    for (double& x : v) x /= len;
    out.set(n, v);
  }
  return out;
}

double constraint_identity_residual(const DirectorField& d) {
  const Grid& g = d.grid();
  const auto grad = discrete_gradient(d);
  const CellVectorField lap = discrete_laplacian(d);
  ScalarField r(g);
  for (std::size_t n = 0; n < g.cell_count(); ++n) {
    double s = 0.0;
    for (int m = 0; m < 3; ++m) {
      s += lap.component(m)[n] * d.component(m)[n];
      for (int a = 0; a < g.dim(); ++a) s += grad[m].axis[a][n] * grad[m].axis[a][n];
    }
    r[n] = s;
  }
  return l2_norm(r);
}

BoundaryConsistency boundary_consistency(const DirectorField& d) {
  const Grid& g = d.grid();
  const auto grad = discrete_gradient(d);
  const CellVectorField lap = discrete_laplacian(d);
  double bsum = 0.0, isum = 0.0;
  std::size_t bcount = 0, icount = 0;
  for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
    const int pos[3] = {i, j, k};
    bool wall = false;
    if (!g.periodic())
      for (int a = 0; a < g.dim(); ++a) wall = wall || pos[a] == 0 || pos[a] == g.cells(a) - 1;
    double gsq = 0.0;
    for (int m = 0; m < 3; ++m)
      for (int a = 0; a < g.dim(); ++a) gsq += grad[m].axis[a][n] * grad[m].axis[a][n];
    double r2 = 0.0;
    for (int m = 0; m < 3; ++m) {
      const double r = lap.component(m)[n] + gsq * d.component(m)[n];
      r2 += r * r;
    }
    if (wall) {
      bsum += r2;
      ++bcount;
    } else {
      isum += r2;
      ++icount;
    }
  });
  BoundaryConsistency out;
  if (bcount) out.boundary_rms = std::sqrt(bsum / bcount);
  if (icount) out.interior_rms = std::sqrt(isum / icount);
  return out;
}

} // namespace nematic
