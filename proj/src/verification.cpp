#include "nematic/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "nematic/errors.hpp"
#include "nematic/format.hpp"
#include "nematic/simulation.hpp"
#include "nematic/solver.hpp"

namespace nematic {

namespace {

constexpr double kPi = std::numbers::pi;

// Centered first derivative along `axis`, one-sided second order at box
// boundaries. Deliberately separate from the solver's gradient.
std::vector<double> derivative(std::span<const double> f, const Grid& g, int axis) {
  std::vector<double> out(f.size());
  const int n = g.cells(axis);
  const double h = g.spacing(axis);
  const std::size_t st = g.stride(axis);
  for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
    const int p = axis == 0 ? i : axis == 1 ? j : k;
    const std::size_t base = idx - static_cast<std::size_t>(p) * st;
    auto at = [&](int q) { return f[base + static_cast<std::size_t>(q) * st]; };
    if (g.periodic()) {
      out[idx] = (at((p + 1) % n) - at((p - 1 + n) % n)) / (2.0 * h);
    } else if (p == 0) {
      out[idx] = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    } else if (p == n - 1) {
      out[idx] = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    } else {
      out[idx] = (at(p + 1) - at(p - 1)) / (2.0 * h);
    }
  });
  return out;
}

// Velocity component c averaged from its faces to cell centers.
std::vector<double> center_velocity(const VectorField& u, int c) {
  const Grid& g = u.grid();
  std::vector<double> out(g.cell_count());
  const auto uc = u.component(c);
  const int n = g.cells(c);
  for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
    std::array<int, 3> lo{i, j, k};
    std::array<int, 3> hi = lo;
    hi[c] = g.periodic() ? (lo[c] + 1) % n : lo[c] + 1;
    out[idx] = 0.5 * (uc[g.face_index(c, lo[0], lo[1], lo[2])] + uc[g.face_index(c, hi[0], hi[1], hi[2])]);
  });
  return out;
}

bool bitwise_equal(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool bitwise_equal(const FlowState& a, const FlowState& b) {
  if (!bitwise_equal(a.rho.values(), b.rho.values())) return false;
  if (!bitwise_equal(a.p.values(), b.p.values())) return false;
  for (int c = 0; c < 3; ++c)
    if (!bitwise_equal(a.u.component(c), b.u.component(c))) return false;
  for (int k = 0; k < 3; ++k)
    if (!bitwise_equal(a.d.component(k), b.d.component(k))) return false;
  return std::memcmp(&a.t, &b.t, sizeof(double)) == 0;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string solver_text(const SolverConfig& c) {
  std::ostringstream o;
  o << "nu=" << shortest(c.nu) << ";lambda=" << shortest(c.lambda) << ";gamma=" << shortest(c.gamma)
    << ";d_star=" << shortest(c.d_star[0]) << ',' << shortest(c.d_star[1]) << ','
    << shortest(c.d_star[2]);
  return o.str();
}

} // namespace

// ---- compatibility ------------------------------------------------------------

CompatibilityReport compatibility_residual(const ScalarField& rho0, const VectorField& u0,
                                           const ScalarField& p0, const DirectorField& d0,
                                           const SolverConfig& cfg, bool reject) {
  const Grid& g = rho0.grid();
  const int dim = g.dim();
  const std::size_t N = g.cell_count();
  CompatibilityReport rep{CellVectorField(g), CellVectorField(g), 0.0, {}};

  // Director gradients D_a d_k.
  std::array<std::array<std::vector<double>, 3>, 3> Dd;
  for (int a = 0; a < dim; ++a)
    for (int k = 0; k < 3; ++k) Dd[a][k] = derivative(d0.component(k), g, a);

  for (int i = 0; i < dim; ++i) {
    auto out = rep.lhs.component(i);
    const std::vector<double> ui = center_velocity(u0, i);
    for (int a = 0; a < dim; ++a) {
      const auto second = derivative(derivative(ui, g, a), g, a);
      for (std::size_t n = 0; n < N; ++n) out[n] -= cfg.nu * second[n];
    }
    const auto dp = derivative(p0.values(), g, i);
    for (std::size_t n = 0; n < N; ++n) out[n] -= dp[n];
    for (int j = 0; j < dim; ++j) {
      std::vector<double> tij(N, 0.0);
      for (int k = 0; k < 3; ++k)
        for (std::size_t n = 0; n < N; ++n) tij[n] += Dd[i][k][n] * Dd[j][k][n];
      const auto dt = derivative(tij, g, j);
      for (std::size_t n = 0; n < N; ++n) out[n] -= cfg.lambda * dt[n];
    }
  }

  for (std::size_t n = 0; n < N; ++n) {
    const auto v = rep.lhs.at(n);
    const double mag = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    const double w = 1.0 / std::sqrt(std::max(rho0[n], 1e-30));
    rep.g0.set(n, {v[0] * w, v[1] * w, v[2] * w});
    if (rho0[n] < 1e-12 && mag > 1e-8) rep.violations.push_back(n);
  }
  rep.g0_norm = l2_norm(rep.g0);
  if (reject && !rep.violations.empty())
    throw CompatibilityError("compatibility condition violated in " +
                                 std::to_string(rep.violations.size()) +
                                 " vacuum cells: the momentum residual must vanish where rho0 = 0",
                             rep.violations);
  return rep;
}

CompatibilityReport compatibility_residual(const FlowState& s, const SolverConfig& cfg,
                                           bool reject) {
  const Grid& g = s.grid();
  ScalarField p0 = s.p;
  for (int a = 0; a < g.dim(); ++a)
    for (int k = 0; k < 3; ++k) {
      const auto dk = derivative(s.d.component(k), g, a);
      for (std::size_t n = 0; n < g.cell_count(); ++n) p0[n] -= 0.5 * cfg.lambda * dk[n] * dk[n];
    }
  return compatibility_residual(s.rho, s.u, p0, s.d, cfg, reject);
}

// ---- manufactured solution ------------------------------------------------------

namespace {

// rho = 1 + 0.5 sin(x - t) sin y
// u   = A(t) (sin x cos y, -cos x sin y),  A = a (1 + 0.5 sin t)
// P   = q cos t sin x sin y  (effective pressure)
// d   = (cos(x + t), sin(x + t), eps) / sqrt(1 + eps^2)
struct Manufactured {
  double a = 0.5, q = 0.2, eps = 0.5;
  double nu = 1, lambda = 1, gamma = 1;

  double A(double t) const { return a * (1.0 + 0.5 * std::sin(t)); }
  double dA(double t) const { return 0.5 * a * std::cos(t); }
  double rho(double x, double y, double t) const { return 1.0 + 0.5 * std::sin(x - t) * std::sin(y); }
  std::array<double, 2> u(double x, double y, double t) const {
    return {A(t) * std::sin(x) * std::cos(y), -A(t) * std::cos(x) * std::sin(y)};
  }
  double P(double x, double y, double t) const { return q * std::cos(t) * std::sin(x) * std::sin(y); }
  std::array<double, 3> d(double x, double, double t) const {
    const double s = std::sqrt(1.0 + eps * eps);
    return {std::cos(x + t) / s, std::sin(x + t) / s, eps / s};
  }

  double f_rho(double x, double y, double t) const {
    const double rt = -0.5 * std::cos(x - t) * std::sin(y);
    const double rx = 0.5 * std::cos(x - t) * std::sin(y);
    const double ry = 0.5 * std::sin(x - t) * std::cos(y);
    const auto v = u(x, y, t);
    return rt + v[0] * rx + v[1] * ry;
  }

  double f_u(int c, double x, double y, double t) const {
    const double At = A(t);
    const std::array<double, 2> shape{std::sin(x) * std::cos(y), -std::cos(x) * std::sin(y)};
    const double ut = dA(t) * shape[c];
    // (u . grad) u for the Taylor-Green shape.
    const double adv = At * At * 0.5 * (c == 0 ? std::sin(2.0 * x) : std::sin(2.0 * y));
    const double lap = -2.0 * At * shape[c];
    const double gradP = c == 0 ? q * std::cos(t) * std::cos(x) * std::sin(y)
                                : q * std::cos(t) * std::sin(x) * std::cos(y);
    // lambda (Lap d . d_c d); d depends on x only.
    const double s2 = 1.0 + eps * eps;
    double elastic = 0.0;
    if (c == 0) {
      const std::array<double, 3> dx{-std::sin(x + t), std::cos(x + t), 0.0};
      const std::array<double, 3> lapd{-std::cos(x + t), -std::sin(x + t), 0.0};
      elastic = lambda * (dx[0] * lapd[0] + dx[1] * lapd[1]) / s2;
    }
    return rho(x, y, t) * (ut + adv) - nu * lap + gradP + elastic;
  }

  std::array<double, 3> f_d(double x, double y, double t) const {
    const double s = std::sqrt(1.0 + eps * eps);
    const double th = x + t;
    const std::array<double, 3> dx{-std::sin(th) / s, std::cos(th) / s, 0.0};
    const std::array<double, 3> lapd{-std::cos(th) / s, -std::sin(th) / s, 0.0};
    const auto dd = d(x, y, t);
    const double grad_sq = 1.0 / (s * s);
    const double ux = u(x, y, t)[0];
    std::array<double, 3> f{};
    for (int k = 0; k < 3; ++k) f[k] = dx[k] + ux * dx[k] - gamma * (lapd[k] + grad_sq * dd[k]);
    return f;
  }
};

class ManufacturedForcing final : public Forcing {
public:
  ManufacturedForcing(const Grid& g, Manufactured m) : g_(g), m_(m) {}

  void density(double t, ScalarField& out) const override {
    for_each_cell(g_, [&](int i, int j, int k, std::size_t n) {
      const auto x = g_.center(i, j, k);
      out[n] = m_.f_rho(x[0], x[1], t);
    });
  }
  void momentum(double t, VectorField& out) const override {
    for (int c = 0; c < 2; ++c) {
      auto oc = out.component(c);
      for_each_face(g_, c, [&](int i, int j, int k, std::size_t f) {
        const auto x = g_.face_center(c, i, j, k);
        oc[f] = m_.f_u(c, x[0], x[1], t);
      });
    }
  }
  void director(double t, CellVectorField& out) const override {
    for_each_cell(g_, [&](int i, int j, int k, std::size_t n) {
      const auto x = g_.center(i, j, k);
      out.set(n, m_.f_d(x[0], x[1], t));
    });
  }

private:
  Grid g_;
  Manufactured m_;
};

double order(double coarse, double fine, int n_coarse, int n_fine) {
  if (coarse == 0.0 && fine == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::log(coarse / fine) / std::log(static_cast<double>(n_fine) / n_coarse);
}

} // namespace

MmsTable mms_run(const SolverConfig& base, const std::vector<int>& refinements,
                 const MmsOptions& opt) {
  if (refinements.size() < 3)
    throw VerificationError("mms_run needs at least three refinements");
  for (std::size_t i = 1; i < refinements.size(); ++i)
    if (refinements[i] <= refinements[i - 1])
      throw VerificationError("mms_run refinements must be strictly increasing");
  if (!(opt.horizon > 0.0) || !(opt.dt_factor > 0.0))
    throw VerificationError("mms_run needs a positive horizon and dt factor");

  const auto t0 = std::chrono::steady_clock::now();
  MmsTable table;
  table.cells = refinements;
  Manufactured m;
  m.nu = base.nu;
  m.lambda = base.lambda;
  m.gamma = base.gamma;
  const bool smooth = opt.which == MmsCase::Smooth;

  for (int n : refinements) {
    const Grid g = Grid::uniform(2, n, 2.0 * kPi, Boundary::Periodic);
    SolverConfig cfg = base;
    cfg.rho_floor = 0.0;
    cfg.viscosity = ViscosityMode::Explicit;
    cfg.evolve_density = cfg.evolve_velocity = cfg.evolve_director = true;
    if (smooth) cfg.d_star = {0.0, 0.0, 1.0};
    const double h = g.spacing(0);
    const double dt_target = opt.dt_factor * h * h / std::max({1.0, base.nu, base.gamma});
    const int steps = static_cast<int>(std::ceil(opt.horizon / dt_target));
    const double dt = opt.horizon / steps;
    cfg.dt_policy.adaptive = false;
    cfg.dt_policy.fixed_dt = dt;

    FlowState s(g, cfg.d_star);
    if (smooth) {
      for_each_cell(g, [&](int i, int j, int k, std::size_t c) {
        const auto x = g.center(i, j, k);
        s.rho[c] = m.rho(x[0], x[1], 0.0);
        s.p[c] = m.P(x[0], x[1], 0.0);
        s.d.set(c, m.d(x[0], x[1], 0.0));
      });
      for (int c = 0; c < 2; ++c) {
        auto uc = s.u.component(c);
        for_each_face(g, c, [&](int i, int j, int k, std::size_t f) {
          const auto x = g.face_center(c, i, j, k);
          uc[f] = m.u(x[0], x[1], 0.0)[c];
        });
      }
    }

    Solver solver(g, cfg);
    ManufacturedForcing forcing(g, m);
    for (int it = 0; it < steps; ++it) solver.step(s, dt, smooth ? &forcing : nullptr);
    const double T = s.t;

    double er = 0.0, eu = 0.0, ed = 0.0;
    const double vol = g.cell_volume();
    for_each_cell(g, [&](int i, int j, int k, std::size_t c) {
      const auto x = g.center(i, j, k);
      const double rex = smooth ? m.rho(x[0], x[1], T) : 1.0;
      er += (s.rho[c] - rex) * (s.rho[c] - rex) * vol;
      const auto dex = smooth ? m.d(x[0], x[1], T) : cfg.d_star;
      const auto dv = s.d.at(c);
      for (int q = 0; q < 3; ++q) ed += (dv[q] - dex[q]) * (dv[q] - dex[q]) * vol;
    });
    for (int c = 0; c < 2; ++c) {
      const auto uc = s.u.component(c);
      for_each_face(g, c, [&](int i, int j, int k, std::size_t f) {
        const auto x = g.face_center(c, i, j, k);
        const double uex = smooth ? m.u(x[0], x[1], T)[c] : 0.0;
        eu += (uc[f] - uex) * (uc[f] - uex) * vol;
      });
    }
    table.err_rho.push_back(std::sqrt(er));
    table.err_u.push_back(std::sqrt(eu));
    table.err_d.push_back(std::sqrt(ed));
    table.steps.push_back(steps);
  }
  for (std::size_t i = 1; i < refinements.size(); ++i) {
    const int a = refinements[i - 1], b = refinements[i];
    table.order_rho.push_back(order(table.err_rho[i - 1], table.err_rho[i], a, b));
    table.order_u.push_back(order(table.err_u[i - 1], table.err_u[i], a, b));
    table.order_d.push_back(order(table.err_d[i - 1], table.err_d[i], a, b));
  }
  table.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return table;
}

std::vector<std::string> mms_failures(const MmsTable& t) {
  std::vector<std::string> out;
  auto check = [&](const char* name, const std::vector<double>& orders,
                   const std::vector<double>& errs, double lo, double hi) {
    for (std::size_t i = 0; i < orders.size(); ++i) {
      if (errs[i] == 0.0 && errs[i + 1] == 0.0) continue;
      const double o = orders[i];
      if (!(o >= lo && o <= hi))
        out.push_back(std::string(name) + " order " + shortest(o) + " between " +
                      std::to_string(t.cells[i]) + " and " + std::to_string(t.cells[i + 1]) +
                      " cells is outside [" + shortest(lo) + ", " + shortest(hi) + "]");
    }
  };
  const double inf = std::numeric_limits<double>::infinity();
  check("density", t.order_rho, t.err_rho, 0.8, inf);
  check("velocity", t.order_u, t.err_u, 1.7, 2.3);
  check("director", t.order_d, t.err_d, 1.7, 2.3);
  return out;
}

void write_mms_csv(std::ostream& out, const MmsTable& t, const SolverConfig& cfg) {
  out << "# config_hash=" << config_hash(solver_text(cfg)) << " refinements=" << join(t.cells)
      << " seconds=" << shortest(t.seconds) << '\n';
  out << "cells,steps,err_rho,err_u,err_d,order_rho,order_u,order_d\n";
  for (std::size_t i = 0; i < t.cells.size(); ++i) {
    out << t.cells[i] << ',' << t.steps[i] << ',' << shortest(t.err_rho[i]) << ','
        << shortest(t.err_u[i]) << ',' << shortest(t.err_d[i]);
    if (i == 0) {
      out << ",,,\n";
    } else {
      out << ',' << shortest(t.order_rho[i - 1]) << ',' << shortest(t.order_u[i - 1]) << ','
          << shortest(t.order_d[i - 1]) << '\n';
    }
  }
}

// ---- distances ------------------------------------------------------------------

double Distance::total() const { return std::sqrt(rho * rho + u * u + d * d); }

double lp_norm(const ScalarField& f, double p) {
  double s = 0.0;
  for (double v : f.values()) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid().cell_volume(), 1.0 / p);
}

Distance uniqueness_distance(const FlowState& a, const FlowState& b) {
  const Grid& g = a.grid();
  Distance out;
  ScalarField dr(g);
  for (std::size_t n = 0; n < g.cell_count(); ++n) dr[n] = a.rho[n] - b.rho[n];
  out.rho = lp_norm(dr, 1.5);
  VectorField du(g);
  for (int c = 0; c < g.dim(); ++c) {
    auto o = du.component(c);
    for (std::size_t f = 0; f < o.size(); ++f) o[f] = a.u.component(c)[f] - b.u.component(c)[f];
  }
  out.u = l2_norm(du, &b.rho);
  DirectorField dd(g, {0.0, 0.0, 0.0});
  for (std::size_t n = 0; n < g.cell_count(); ++n) {
    const auto va = a.d.at(n), vb = b.d.at(n);
    dd.set(n, {va[0] - vb[0], va[1] - vb[1], va[2] - vb[2]});
  }
  out.d = l2_norm(discrete_gradient(dd));
  return out;
}

// ---- vacuum approximation -----------------------------------------------------------

VacuumCompareTable vacuum_approx_compare(const RunConfig& base, const VacuumCompareOptions& opt) {
  if (opt.j_list.size() < 2) throw VerificationError("vacuum_approx_compare needs two or more j values");
  for (int j : opt.j_list)
    if (j <= 0) throw VerificationError("vacuum_approx_compare needs positive j");
  if (!(opt.horizon > 0.0) || opt.output_every <= 0)
    throw VerificationError("vacuum_approx_compare needs a positive horizon and output cadence");

  const FlowState s0 = make_initial_state(base.grid, base.initial, base.solver.d_star);
  auto lifted = [&](int j) {
    FlowState s = s0;
    for (double& v : s.rho.values()) v += 1.0 / j;
    return s;
  };

  RunConfig cfg = base;
  cfg.rho_floor_auto = false;
  cfg.solver.rho_floor = 0.0;
  cfg.run.t_end = opt.horizon;
  cfg.run.max_steps = -1;
  double dt = std::numeric_limits<double>::infinity();
  for (int j : opt.j_list) {
    const Solver probe(base.grid, cfg.solver);
    dt = std::min(dt, probe.admissible_dt(lifted(j)));
  }
  if (!std::isfinite(dt)) dt = opt.horizon / 10.0;
  dt *= base.solver.dt_policy.safety;
  VacuumCompareTable table;
  table.steps = static_cast<int>(std::ceil(opt.horizon / dt));
  table.dt = opt.horizon / table.steps;
  cfg.solver.dt_policy.adaptive = false;
  cfg.solver.dt_policy.fixed_dt = table.dt;

  std::vector<std::vector<FlowState>> traj;
  for (int j : opt.j_list) {
    Simulation sim(cfg, lifted(j), {.track_ledger = false, .check_compatibility = false});
    std::vector<FlowState> out{sim.state()};
    for (int it = 1; it <= table.steps; ++it) {
      sim.advance(table.dt);
      if (it % opt.output_every == 0 || it == table.steps) out.push_back(sim.state());
    }
    traj.push_back(std::move(out));
  }

  const std::size_t m = opt.j_list.size();
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a + 1; b < m; ++b) {
      VacuumPair p{opt.j_list[a], opt.j_list[b], {}};
      for (std::size_t o = 0; o < traj[a].size(); ++o) {
        const Distance d = uniqueness_distance(traj[a][o], traj[b][o]);
        p.sup.rho = std::max(p.sup.rho, d.rho);
        p.sup.u = std::max(p.sup.u, d.u);
        p.sup.d = std::max(p.sup.d, d.d);
      }
      table.pairs.push_back(p);
    }

  // Pairs against the largest j, ordered by the smaller index.
  std::size_t kmax = 0;
  for (std::size_t a = 1; a < m; ++a)
    if (opt.j_list[a] > opt.j_list[kmax]) kmax = a;
  std::vector<VacuumPair> ref;
  for (const auto& p : table.pairs)
    if (p.j == opt.j_list[kmax] || p.k == opt.j_list[kmax]) ref.push_back(p);
  std::sort(ref.begin(), ref.end(),
            [](const VacuumPair& x, const VacuumPair& y) { return std::min(x.j, x.k) < std::min(y.j, y.k); });
  constexpr double noise = 1e-6;
  for (std::size_t i = 1; i < ref.size(); ++i) {
    const auto& lo = ref[i - 1].sup;
    const auto& hi = ref[i].sup;
    auto warn = [&](const char* what, double before, double after) {
      if (after > before + noise)
        table.warnings.push_back(std::string(what) + " distance grows from j=" +
                                 std::to_string(std::min(ref[i - 1].j, ref[i - 1].k)) + " to j=" +
                                 std::to_string(std::min(ref[i].j, ref[i].k)));
    };
    warn("density", lo.rho, hi.rho);
    warn("velocity", lo.u, hi.u);
    warn("director", lo.d, hi.d);
  }
  return table;
}

void write_vacuum_csv(std::ostream& out, const VacuumCompareTable& t, const RunConfig& base) {
  out << "# config_hash=" << config_hash(to_ini(base)) << " dt=" << shortest(t.dt)
      << " steps=" << t.steps << '\n';
  out << "j,k,rho_3_2,sqrt_rho_u,grad_d\n";
  for (const auto& p : t.pairs)
    out << p.j << ',' << p.k << ',' << shortest(p.sup.rho) << ',' << shortest(p.sup.u) << ','
        << shortest(p.sup.d) << '\n';
  for (const auto& w : t.warnings) out << "# warning: " << w << '\n';
}

// ---- twin runs ------------------------------------------------------------------------

TwinResult twin_run_divergence(const RunConfig& base, const TwinOptions& opt) {
  if (!(opt.sigma >= 0.0 && opt.sigma <= 1e-6))
    throw VerificationError("twin_run_divergence needs sigma in [0, 1e-6]");
  RunConfig cfg = base;
  cfg.run.t_end = opt.horizon;
  cfg.run.max_steps = opt.max_steps;
  if (opt.max_steps >= 0) cfg.run.t_end = std::numeric_limits<double>::infinity();

  const FlowState a0 = make_initial_state(cfg.grid, cfg.initial, cfg.solver.d_star);
  FlowState b0 = a0;
  if (opt.sigma > 0.0) {
    const Grid& g = cfg.grid;
    auto bump = [&](const std::array<double, 3>& x) {
      double p = 1.0;
      for (int a = 0; a < g.dim(); ++a) p *= std::cos(2.0 * kPi * x[a] / g.length(a));
      return 0.5 * (1.0 + p);
    };
    const double rho_bar = std::max(a0.rho.max(), 1e-300);
    const auto& ds = cfg.solver.d_star;
    const std::array<double, 3> e = std::abs(ds[0]) < 0.9 ? std::array<double, 3>{1, 0, 0}
                                                           : std::array<double, 3>{0, 1, 0};
    for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
      const auto x = g.center(i, j, k);
      const double b = bump(x);
      b0.rho[n] += opt.sigma * rho_bar * b;
      if (!opt.density_only) {
        auto v = b0.d.at(n);
        for (int q = 0; q < 3; ++q) v[q] += opt.sigma * b * e[q];
        const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        for (double& c : v) c /= len;
        b0.d.set(n, v);
      }
    });
    if (!opt.density_only) {
      VectorField du(g);
      velocity_from_stream_function(du, [&](double x, double y, double z) {
        double p = 1.0;
        const std::array<double, 3> pt{x, y, z};
        for (int a = 0; a < g.dim(); ++a) {
          const double s = std::sin(kPi * pt[a] / g.length(a));
          p *= s * s;
        }
        return opt.sigma * g.length(0) / (2.0 * kPi) * p;
      });
      for (int c = 0; c < g.dim(); ++c)
        for (std::size_t f = 0; f < du.component(c).size(); ++f)
          b0.u.component(c)[f] += du.component(c)[f];
    }
  }

  const SimulationOptions so{.track_ledger = false, .check_compatibility = false};
  Simulation A(cfg, a0, so);
  Simulation B(cfg, b0, so);
  TwinResult r;
  auto sample = [&] {
    const Distance d = uniqueness_distance(B.state(), A.state());
    r.times.push_back(A.state().t);
    r.distances.push_back(d);
    r.max_distance = std::max(r.max_distance, d.total());
  };
  sample();
  while (!A.finished()) {
    const double dt = A.next_dt();
    A.advance(dt);
    B.advance(dt);
    ++r.steps;
    if (opt.sigma == 0.0) {
      if (!bitwise_equal(A.state(), B.state())) {
        r.bitwise_identical = false;
        throw DeterminismError("twin runs from identical inputs diverged at step " +
                               std::to_string(r.steps));
      }
    }
    sample();
  }
  if (opt.sigma > 0.0) r.bitwise_identical = bitwise_equal(A.state(), B.state());

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double d = r.distances[i].total();
    if (!(d > 0.0)) continue;
    const double y = std::log(d);
    sx += r.times[i];
    sy += y;
    sxx += r.times[i] * r.times[i];
    sxy += r.times[i] * y;
    ++cnt;
  }
  if (cnt >= 2) {
    const double den = cnt * sxx - sx * sx;
    if (den > 0.0) r.growth_rate = (cnt * sxy - sx * sy) / den;
  }
  return r;
}

std::uint64_t config_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace nematic
