#include "nematic/driver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nematic/errors.hpp"
#include "nematic/format.hpp"
#include "nematic/simulation.hpp"
#include "nematic/snapshot.hpp"
#include "nematic/verification.hpp"

namespace nematic {

namespace {

using json = nlohmann::json;

json ledger_json(const EnergyLedger& l) {
  const auto& s = l.sups();
  const auto& i = l.integrals();
  return {
      {"c0", l.c0()},
      {"time", l.time()},
      {"E1", l.e1()},
      {"E2", l.e2()},
      {"E", l.e_total()},
      {"first_derivatives_available", l.first_derivatives_available()},
      {"second_derivatives_available", l.second_derivatives_available()},
      {"sup",
       {{"grad_u", s.grad_u}, {"hess_d", s.hess_d}, {"sqrt_rho_ut", s.sqrt_rho_ut},
        {"hess_u", s.hess_u}, {"grad_p", s.grad_p}, {"grad3_d", s.grad3_d},
        {"grad_rho", s.grad_rho}, {"rho_t", s.rho_t}}},
      {"integral",
       {{"grad_u", i.grad_u}, {"lap_d", i.lap_d}, {"sqrt_rho_ut", i.sqrt_rho_ut},
        {"hess_u", i.hess_u}, {"grad_p", i.grad_p}, {"grad3_d", i.grad3_d},
        {"grad_ut", i.grad_ut}, {"d_tt", i.d_tt}, {"hess_dt", i.hess_dt}}},
  };
}

std::string snapshot_name(std::int64_t step) {
  std::ostringstream o;
  o << "step_" << std::setw(8) << std::setfill('0') << step << ".snap";
  return o.str();
}

// Solver breakdowns that signal the run leaving the resolvable regime.
struct Breakdown {
  std::string field;
  std::string message;
};

} // namespace

RunOutcome run_simulation(const RunConfig& cfg, const std::filesystem::path& out_dir,
                          std::ostream& log) {
  RunOutcome out;
  const bool write = !out_dir.empty();
  std::ofstream csv;
  std::filesystem::path snap_dir;
  if (write) {
    std::filesystem::create_directories(out_dir);
    snap_dir = out_dir / "snapshots";
    std::filesystem::create_directories(snap_dir);
    std::ofstream(out_dir / "resolved.ini") << to_ini(cfg);
  }

  json summary;
  summary["config_ini"] = to_ini(cfg);
  summary["physics"] = {{"nu", cfg.solver.nu}, {"lambda", cfg.solver.lambda},
                        {"gamma", cfg.solver.gamma}};
  summary["pressure"] = "effective pressure p + lambda |grad d|^2 / 2";
  auto finish = [&]() {
    summary["status"] = out.status;
    summary["exit_code"] = out.exit_code;
    summary["message"] = out.message;
    summary["steps"] = out.steps;
    summary["t_final"] = out.t_final;
    summary["T_star"] = out.blew_up ? json(out.t_star) : json(nullptr);
    summary["blowup_field"] = out.blew_up ? json(out.blowup_field) : json(nullptr);
    if (write) std::ofstream(out_dir / "summary.json") << summary.dump(2) << '\n';
    return out;
  };

  std::optional<Simulation> sim;
  try {
    sim.emplace(cfg);
  } catch (const CompatibilityError& e) {
    out.exit_code = kExitConfig;
    out.status = "rejected";
    out.message = e.what();
    log << "error: " << e.what() << '\n';
    return finish();
  } catch (const ConfigError& e) {
    out.exit_code = kExitConfig;
    out.status = "rejected";
    out.message = e.what();
    log << "error: " << e.what() << '\n';
    return finish();
  } catch (const ConstraintError& e) {
    out.exit_code = kExitConfig;
    out.status = "rejected";
    out.message = e.what();
    log << "error: " << e.what() << '\n';
    return finish();
  }
  if (!sim->compatibility_warnings().empty())
    log << "warning: compatibility condition violated in " << sim->compatibility_warnings().size()
        << " vacuum cells\n";
  summary["compatibility_warnings"] = sim->compatibility_warnings().size();
  summary["rho_floor"] = sim->config().solver.rho_floor;

  const FlowState& s = sim->state();
  out.c0 = sim->ledger().c0();
  out.h1_level = h1_level(s);
  out.verdict = smallness_check(out.c0, out.h1_level, cfg.grid.dim(), cfg.solver.eps0);
  summary["smallness"] = {{"c0", out.c0},
                          {"h1_level", out.h1_level},
                          {"dim", cfg.grid.dim()},
                          {"eps0", cfg.solver.eps0},
                          {"verdict", to_string(out.verdict)},
                          {"note", "eps0 is a configured proxy; the verdict is informational"}};

  if (write) {
    csv.open(out_dir / "diagnostics.csv");
    write_csv_header(csv);
    write_csv_row(csv, sim->records().back());
    write_snapshot(snap_dir / snapshot_name(0), s);
  }

  const std::int64_t every = cfg.run.snapshot_every;
  std::optional<Breakdown> broke;
  double attempted = 0.0;
  while (!sim->finished()) {
    try {
      attempted = sim->next_dt();
      if (attempted < 1e-14 * std::max(1.0, s.t))
        throw BlowupError("time step collapsed below round-off", "dt");
      const DiagnosticsRecord& r = sim->advance(attempted);
      if (write) {
        write_csv_row(csv, r);
        if (every > 0 && s.step % every == 0) write_snapshot(snap_dir / snapshot_name(s.step), s);
      }
      if (r.blowup_flag) {
        broke = Breakdown{"state", "blow-up flag raised by the invariant report"};
        break;
      }
    } catch (const BlowupError& e) {
      broke = Breakdown{e.field, e.what()};
    } catch (const ConvergenceError& e) {
      broke = Breakdown{"p", e.what()};
    } catch (const StepSizeError& e) {
      broke = Breakdown{"dt", e.what()};
    } catch (const ConstraintError& e) {
      broke = Breakdown{"d", e.what()};
    } catch (const VacuumError& e) {
      out.exit_code = kExitConfig;
      out.status = "rejected";
      out.message = e.what();
      log << "error: " << e.what() << '\n';
      break;
    }
    if (broke) break;
  }

  out.steps = s.step;
  out.t_final = s.t;
  if (write && (every <= 0 || s.step % every != 0)) write_snapshot(snap_dir / snapshot_name(s.step), s);
  out.max_e1 = sim->ledger().e1();
  summary["ledger"] = ledger_json(sim->ledger());
  summary["rows"] = sim->records().size();

  if (out.status == "rejected") return finish();
  if (broke) {
    out.exit_code = kExitBlowup;
    out.status = "blowup";
    out.blew_up = true;
    out.t_star = s.t + attempted;
    out.blowup_field = broke->field;
    out.message = broke->message;
    summary["last_accepted_time"] = s.t;
    log << "blow-up at t = " << shortest(out.t_star) << " (" << broke->message << ")\n";
  } else {
    out.exit_code = kExitOk;
    out.status = "completed";
    log << "completed " << out.steps << " steps, t = " << shortest(out.t_final) << '\n';
  }
  return finish();
}

// ---- verify suite ------------------------------------------------------------------

namespace {

constexpr double kTwoPi = 6.283185307179586;

RunConfig suite_config(const std::string& profile, int n, double t_end, std::int64_t steps) {
  RunConfig c;
  c.grid = Grid::uniform(2, n, kTwoPi, Boundary::Periodic);
  c.initial.profile = profile;
  c.run.t_end = t_end;
  c.run.max_steps = steps;
  c.initial = c.initial.resolve();
  return c;
}

void random_fill(std::span<double> v, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  for (double& x : v) x = d(rng);
}

VectorField random_solenoidal(const Grid& g, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::array<double, 8> c{};
  for (double& x : c) x = d(rng);
  VectorField u(g);
  velocity_from_stream_function(u, [&](double x, double y, double) {
    const double kx = kTwoPi / g.length(0), ky = kTwoPi / g.length(1);
    double p = c[0] * std::sin(kx * x) * std::sin(ky * y) + c[1] * std::sin(2 * kx * x + c[2]) * std::sin(ky * y) +
               c[3] * std::cos(kx * x) * std::sin(2 * ky * y + c[4]) + c[5] * std::sin(kx * x + ky * y + c[6]);
    if (!g.periodic()) {
      const double sx = std::sin(0.5 * kx * x), sy = std::sin(0.5 * ky * y);
      p *= sx * sx * sy * sy;
    }
    return amp * p;
  });
  return u;
}

VerifyRow row_duality() {
  VerifyRow r{"operator duality", true, {}, 0.0};
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (const Grid& g : {Grid::uniform(2, 24, kTwoPi, Boundary::Periodic),
                        Grid::uniform(2, 20, 1.0, Boundary::DirichletBox),
                        Grid::uniform(3, 8, 1.0, Boundary::DirichletBox)}) {
    ScalarField p(g);
    random_fill(p.values(), rng, -1.0, 1.0);
    VectorField u(g);
    for (int c = 0; c < g.dim(); ++c) random_fill(u.component(c), rng, -1.0, 1.0);
    u.zero_walls();
    const double lhs = inner(face_gradient(p), u);
    const double rhs = -inner(p, discrete_divergence(u));
    const double scale = std::abs(lhs) + std::abs(rhs) + 1.0;
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  r.passed = worst <= 1e-12;
  r.detail = "max relative mismatch " + shortest(worst);
  return r;
}

VerifyRow row_projection() {
  VerifyRow r{"projection idempotence", true, {}, 0.0};
  std::mt19937_64 rng(12);
  double worst = 0.0, div = 0.0;
  bool ok = true;
  for (const Grid& g : {Grid::uniform(2, 32, kTwoPi, Boundary::Periodic),
                        Grid::uniform(2, 32, 1.0, Boundary::DirichletBox)}) {
    SolverConfig cfg;
    ScalarField rho(g);
    random_fill(rho.values(), rng, 0.5, 2.0);
    VectorField u(g);
    for (int c = 0; c < g.dim(); ++c) random_fill(u.component(c), rng, -1.0, 1.0);
    u.zero_walls();
    Projector proj(g, cfg.preconditioner);
    const ProjectionResult once = proj.project(u, rho, cfg, 1.0);
    const ProjectionResult twice = proj.project(once.velocity, rho, cfg, 1.0);
    double diff = 0.0;
    for (int c = 0; c < g.dim(); ++c)
      for (std::size_t f = 0; f < once.velocity.component(c).size(); ++f)
        diff = std::max(diff, std::abs(once.velocity.component(c)[f] - twice.velocity.component(c)[f]));
    worst = std::max(worst, diff / std::max(once.velocity.max_abs(), 1e-300));
    div = std::max(div, once.max_divergence);
    ok = ok && once.max_divergence <= cfg.div_tol(g);
  }
  r.passed = ok && worst <= 1e-8;
  r.detail = "relative change on reprojection " + shortest(worst) + ", max div " + shortest(div);
  return r;
}

VerifyRow row_max_principle() {
  VerifyRow r{"max principle", true, {}, 0.0};
  std::mt19937_64 rng(13);
  bool ok = true;
  double mass_err = 0.0, excess = 0.0;
  for (const Grid& g : {Grid::uniform(2, 48, kTwoPi, Boundary::Periodic),
                        Grid::uniform(2, 48, 1.0, Boundary::DirichletBox)}) {
    ScalarField rho(g);
    random_fill(rho.values(), rng, 0.2, 1.7);
    const VectorField u = random_solenoidal(g, rng, g.periodic() ? 0.5 : 0.2);
    const DensityBounds b = DensityBounds::of(rho);
    const double m0 = rho.sum();
    const double dt = 0.5 * admissible_advection_dt(u);
    for (int it = 0; it < 200; ++it) {
      rho = advect_density(rho, u, dt);
      excess = std::max({excess, b.lower - rho.min(), rho.max() - b.upper});
      mass_err = std::max(mass_err, std::abs(rho.sum() - m0) / m0);
    }
    ok = ok && excess <= 1e-12 && mass_err <= 1e-12;
  }
  r.passed = ok;
  r.detail = "bound excess " + shortest(std::max(excess, 0.0)) + ", relative mass drift " + shortest(mass_err);
  return r;
}

VerifyRow row_unit_norm() {
  VerifyRow r{"unit norm", true, {}, 0.0};
  RunConfig c = suite_config("perturbed_circle", 32, std::numeric_limits<double>::infinity(), 100);
  c.initial.amplitude = 0.5;
  Simulation sim(c);
  double worst = 0.0;
  while (!sim.finished()) worst = std::max(worst, sim.advance().max_unit_violation);
  r.passed = worst <= 1e-14;
  r.detail = "max ||d|-1| " + shortest(worst);
  return r;
}

VerifyRow row_energy(double elastic_sign) {
  VerifyRow r{"energy dissipation", true, {}, 0.0};
  RunConfig c = suite_config("perturbed_circle", 32, 1.0, -1);
  c.initial.amplitude = 1.0;
  c.initial.director_amplitude = 0.5;
  c.solver.nu = 0.05;
  c.solver.gamma = 0.1;
  c.solver.elastic_sign = elastic_sign;
  double growth = 0.0;
  try {
    Simulation sim(c, {.track_ledger = false, .check_compatibility = true});
    double prev = sim.records().back().kinetic + sim.records().back().elastic;
    const double tol = 1e-6 * std::max(1.0, prev);
    while (!sim.finished()) {
      const DiagnosticsRecord& rec = sim.advance();
      const double e = rec.kinetic + rec.elastic;
      growth = std::max(growth, e - prev);
      prev = e;
    }
    r.passed = growth <= tol;
    r.detail = "max per-step increase " + shortest(growth) + " (tolerance " + shortest(tol) + ")";
  } catch (const Error& e) {
    r.passed = false;
    r.detail = std::string("run failed: ") + e.what();
  }
  return r;
}

VerifyRow row_harmonic() {
  VerifyRow r{"harmonic-map stationarity", true, {}, 0.0};
  RunConfig c = suite_config("circle_map", 64, 1.0, -1);
  Simulation sim(c, {.track_ledger = false, .check_compatibility = true});
  const DirectorField d0 = sim.state().d;
  double drift = 0.0;
  while (!sim.finished()) {
    sim.advance();
    for (int k = 0; k < 3; ++k)
      for (std::size_t n = 0; n < d0.size(); ++n)
        drift = std::max(drift, std::abs(sim.state().d.component(k)[n] - d0.component(k)[n]));
  }
  r.passed = drift <= 1e-3;
  r.detail = "sup drift " + shortest(drift) + " over t in [0, 1]";
  return r;
}

VerifyRow row_determinism() {
  VerifyRow r{"determinism", true, {}, 0.0};
  RunConfig c = suite_config("perturbed_circle", 32, std::numeric_limits<double>::infinity(), 200);
  c.initial.amplitude = 0.5;
  try {
    const TwinResult t = twin_run_divergence(c, {.sigma = 0.0, .horizon = 0.0, .max_steps = 200});
    r.passed = t.bitwise_identical && t.max_distance == 0.0;
    r.detail = std::to_string(t.steps) + " steps bitwise identical";
  } catch (const DeterminismError& e) {
    r.passed = false;
    r.detail = e.what();
  }
  return r;
}

} // namespace

std::vector<VerifyRow> run_verify_suite(const VerifyOptions& opt) {
  std::vector<VerifyRow> rows;
  auto timed = [&](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    VerifyRow r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(r));
  };
  timed(row_duality);
  timed(row_projection);
  timed(row_max_principle);
  timed(row_unit_norm);
  timed([&] { return row_energy(opt.elastic_sign); });
  timed(row_harmonic);
  timed(row_determinism);
  // Names survive a throwing row.
  const char* names[] = {"operator duality", "projection idempotence", "max principle", "unit norm",
                         "energy dissipation", "harmonic-map stationarity", "determinism"};
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].name.empty()) rows[i].name = names[i];
  return rows;
}

void print_verify_table(std::ostream& out, const std::vector<VerifyRow>& rows) {
  std::size_t w = 0;
  for (const auto& r : rows) w = std::max(w, r.name.size());
  for (const auto& r : rows) {
    out << std::left << std::setw(static_cast<int>(w) + 2) << r.name << (r.passed ? "PASS" : "FAIL")
        << "  " << std::fixed << std::setprecision(2) << r.seconds << "s  " << r.detail << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

// ---- sweep ----------------------------------------------------------------------------

int worker_threads() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NEMATIC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) n = v;
  }
  return std::max(n, 1);
}

std::vector<SweepRow> run_sweep(const RunConfig& base, const std::vector<double>& amplitudes,
                                int threads) {
  if (amplitudes.empty()) throw ConfigError("sweep needs at least one amplitude");
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (!std::isfinite(amplitudes[i]) || amplitudes[i] < 0.0)
      throw ConfigError("sweep amplitudes must be finite and nonnegative");
    if (i > 0 && !(amplitudes[i] > amplitudes[i - 1]))
      throw ConfigError("sweep amplitudes must be strictly increasing");
  }
  std::vector<SweepRow> rows(amplitudes.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < amplitudes.size(); i = next++) {
      try {
        RunConfig c = base;
        c.initial.amplitude = amplitudes[i];
        c.initial.director_amplitude = amplitudes[i];
        std::ostringstream sink;
        const RunOutcome o = run_simulation(c, {}, sink);
        if (o.exit_code == kExitConfig) throw ConfigError(o.message);
        SweepRow& r = rows[i];
        r.amplitude = amplitudes[i];
        r.c0 = o.c0;
        r.h1_level = o.h1_level;
        r.verdict = o.verdict;
        r.max_e1 = o.max_e1;
        r.blew_up = o.blew_up;
        r.t_final = o.t_final;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::clamp(threads, 1, static_cast<int>(amplitudes.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const RunConfig& base) {
  out << "# config_hash=" << config_hash(to_ini(base)) << " profile=" << base.initial.profile
      << " eps0=" << shortest(base.solver.eps0) << '\n';
  out << "amplitude,C0,h1_level,verdict,max_E1,blew_up,t_final\n";
  for (const auto& r : rows)
    out << shortest(r.amplitude) << ',' << shortest(r.c0) << ',' << shortest(r.h1_level) << ','
        << to_string(r.verdict) << ',' << shortest(r.max_e1) << ',' << (r.blew_up ? "true" : "false")
        << ',' << shortest(r.t_final) << '\n';
}

} // namespace nematic
