// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nematic/config.hpp"
#include "nematic/diagnostics.hpp"
#include "nematic/director.hpp"
#include "nematic/driver.hpp"
#include "nematic/errors.hpp"
#include "nematic/simulation.hpp"
#include "nematic/verification.hpp"

using namespace nematic;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double sup_diff(const DirectorField& a, const DirectorField& b) {
  double m = 0.0;
  for (int k = 0; k < 3; ++k)
    for (std::size_t n = 0; n < a.size(); ++n)
      m = std::max(m, std::abs(a.component(k)[n] - b.component(k)[n]));
  return m;
}

// ---- criteria 1-5: catalogue runs ------------------------------------------------

struct CatalogueStats {
  std::string name;
  double mass = 0.0, bounds = 0.0, unit = 0.0, div = 0.0, div_tol = 0.0, energy = 0.0, energy_tol = 0.0;
  int steps = 0;
};

std::vector<CatalogueStats> catalogue_runs() {
  std::vector<CatalogueStats> out;
  for (const std::string& name : catalogue()) {
    const RunConfig cfg = load_config(fs::path(NEMATIC_CONFIG_DIR) / (name + ".ini"));
    Simulation sim(cfg, {.track_ledger = false});
    CatalogueStats st;
    st.name = name;
    st.div_tol = cfg.solver.div_tol(cfg.grid);
    const DiagnosticsRecord first = sim.records().front();
    const double e0 = first.kinetic + cfg.solver.lambda * first.elastic;
    st.energy_tol = 1e-6 * std::max(1.0, e0);
    double prev_e = e0;
    while (!sim.finished() && st.steps < 500) {
      const DiagnosticsRecord& r = sim.advance();
      ++st.steps;
      st.mass = std::max(st.mass, std::abs(r.mass - first.mass) / first.mass);
      st.bounds = std::max({st.bounds, first.min_rho - r.min_rho, r.max_rho - first.max_rho});
      st.unit = std::max(st.unit, r.max_unit_violation);
      st.div = std::max(st.div, r.max_div_u);
      const double e = r.kinetic + cfg.solver.lambda * r.elastic;
      st.energy = std::max(st.energy, e - prev_e);
      prev_e = e;
    }
    out.push_back(st);
  }
  return out;
}

// ---- criterion 6 -----------------------------------------------------------------

Verdict energy_identity_refinement() {
  const std::vector<int> levels{16, 32, 64, 128};
  const double horizon = 0.1;
  std::vector<double> res;
  for (int n : levels) {
    RunConfig cfg;
    cfg.grid = Grid::uniform(2, n, 2.0 * std::numbers::pi, Boundary::Periodic);
    cfg.initial.profile = "perturbed_circle";
    cfg.initial.amplitude = 0.0;
    cfg.solver.evolve_velocity = false;
    const double h = cfg.grid.spacing(0);
    const int steps = static_cast<int>(std::ceil(horizon / (h * h / 16.0)));
    cfg.solver.dt_policy.adaptive = false;
    cfg.solver.dt_policy.fixed_dt = horizon / steps;
    cfg.run.t_end = horizon;
    Simulation sim(cfg, {.track_ledger = false});
    double worst = 0.0;
    for (int it = 0; it < steps; ++it)
      worst = std::max(worst, std::abs(sim.advance(cfg.solver.dt_policy.fixed_dt).energy_identity_residual));
    res.push_back(worst);
  }
  Verdict v;
  std::ostringstream d;
  d << "max|R| per level:";
  for (double r : res) d << ' ' << fmt("%.3e", r);
  d << "; factors:";
  for (std::size_t i = 1; i < res.size(); ++i) {
    const double f = res[i - 1] / res[i];
    d << ' ' << fmt("%.2f", f);
    if (!(f >= 3.0)) v.pass = false;
  }
  v.detail = d.str();
  return v;
}

// ---- criterion 7 -----------------------------------------------------------------

Verdict constraint_identity_order() {
  std::vector<double> r;
  for (int n : {32, 64, 128}) {
    const Grid g = Grid::uniform(2, n, 2.0 * std::numbers::pi, Boundary::Periodic);
    DirectorField d(g, {0, 0, 1});
    for_each_cell(g, [&](int i, int j, int k, std::size_t c) {
      const auto x = g.center(i, j, k);
      const double th = std::sin(x[0]) + 0.5 * std::cos(x[1]), ph = 0.5 * std::sin(x[0] + x[1]);
      d.set(c, {std::cos(th) * std::cos(ph), std::sin(th) * std::cos(ph), std::sin(ph)});
    });
    r.push_back(constraint_identity_residual(d));
  }
  Verdict v;
  std::ostringstream d;
  d << "orders:";
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double o = std::log2(r[i - 1] / r[i]);
    d << ' ' << fmt("%.3f", o);
    if (!(o >= 1.8 && o <= 2.2)) v.pass = false;
  }
  v.detail = d.str();
  return v;
}

// ---- criterion 8 -----------------------------------------------------------------

Verdict harmonic_map_stationarity() {
  RunConfig cfg = load_config(fs::path(NEMATIC_CONFIG_DIR) / "circle_map.ini");
  cfg.run.t_end = 1.0;
  cfg.run.max_steps = -1;
  Simulation sim(cfg, {.track_ledger = false});
  const DirectorField d0 = sim.state().d;
  double drift = 0.0;
  while (!sim.finished()) {
    sim.advance();
    drift = std::max(drift, sup_diff(sim.state().d, d0));
  }
  return {drift <= 1e-3, "sup drift " + fmt("%.3e", drift) + " at t = " + fmt("%.3f", sim.state().t)};
}

// ---- criterion 9 -----------------------------------------------------------------

Verdict taylor_green_decay() {
  RunConfig cfg = load_config(fs::path(NEMATIC_CONFIG_DIR) / "taylor_green.ini");
  cfg.solver.evolve_director = false;
  cfg.run.t_end = 0.5;
  cfg.run.max_steps = -1;
  Simulation sim(cfg, {.track_ledger = false});
  const double k0 = sim.records().front().kinetic;
  double worst = 0.0;
  while (!sim.finished()) {
    const DiagnosticsRecord& r = sim.advance();
    const double exact = std::exp(-4.0 * cfg.solver.nu * r.t);
    worst = std::max(worst, std::abs(r.kinetic / k0 - exact) / exact);
  }
  return {worst <= 0.02, "max relative deviation " + fmt("%.3e", worst)};
}

// ---- criterion 10 ----------------------------------------------------------------

Verdict mms_convergence() {
  const MmsTable t = mms_run(SolverConfig{}, {32, 64, 128});
  const auto failures = mms_failures(t);
  Verdict v{failures.empty() && t.seconds <= 600.0, {}};
  std::ostringstream d;
  d << "orders rho/u/d:";
  for (std::size_t i = 0; i < t.order_u.size(); ++i)
    d << ' ' << fmt("%.2f", t.order_rho[i]) << '/' << fmt("%.2f", t.order_u[i]) << '/' << fmt("%.2f", t.order_d[i]);
  d << "; " << fmt("%.1f", t.seconds) << " s";
  for (const auto& f : failures) d << "; " << f;
  v.detail = d.str();
  return v;
}

// ---- criterion 11 ----------------------------------------------------------------

Verdict determinism_and_vacuum() {
  Verdict v;
  std::ostringstream d;
  RunConfig twin = load_config(fs::path(NEMATIC_CONFIG_DIR) / "perturbed_circle.ini");
  twin.initial.amplitude = 0.5;
  try {
    const TwinResult r = twin_run_divergence(twin, {.sigma = 0.0, .horizon = 1e9, .max_steps = 1000});
    d << "twin: " << r.steps << " steps " << (r.bitwise_identical ? "bitwise identical" : "DIVERGED");
    if (!r.bitwise_identical || r.steps != 1000) v.pass = false;
  } catch (const DeterminismError& e) {
    v.pass = false;
    d << "twin: " << e.what();
  }

  const RunConfig vac = load_config(fs::path(NEMATIC_CONFIG_DIR) / "vacuum_bump.ini");
  const VacuumCompareTable t = vacuum_approx_compare(vac, {.j_list = {10, 100, 1000}, .horizon = 0.1});
  double d10 = -1.0, d100 = -1.0;
  for (const VacuumPair& p : t.pairs) {
    if (p.j == 10 && p.k == 1000) d10 = p.sup.total();
    if (p.j == 100 && p.k == 1000) d100 = p.sup.total();
  }
  d << "; vacuum: dist(10,1000) = " << fmt("%.3e", d10) << ", dist(100,1000) = " << fmt("%.3e", d100);
  if (!(d10 > d100) || !t.warnings.empty()) v.pass = false;
  for (const auto& w : t.warnings) d << "; " << w;
  v.detail = d.str();
  return v;
}

// ---- criterion 12 ----------------------------------------------------------------

Verdict smallness_sweep() {
  RunConfig base = parse_config(
      "[grid]\ncells = 32\n[initial]\nprofile = taylor_green\n[run]\nt_end = 1.0\n");
  const std::vector<double> amps{0.0, 0.01, 0.02, 0.04, 0.1, 0.3, 1.0};
  const auto rows = run_sweep(base, amps, worker_threads());
  Verdict v;
  int passing = 0;
  for (const SweepRow& r : rows) {
    if (r.verdict == Smallness::NotSatisfied) continue;
    ++passing;
    if (r.blew_up || r.t_final < 1.0 - 1e-12) v.pass = false;
  }
  if (passing == 0) v.pass = false;
  v.detail = std::to_string(passing) + " of " + std::to_string(rows.size()) +
             " amplitudes satisfy smallness; all of them reach t = 1 without blow-up" +
             (v.pass ? "" : " (violated)");
  return v;
}

} // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::string& name, const Verdict& v) {
    std::cout << (v.pass ? "PASS" : "FAIL") << "  [" << id << "] " << name << ": " << v.detail << std::endl;
    if (!v.pass) ++failed;
  };
  auto guarded = [&](int id, const std::string& name, const std::function<Verdict()>& f) {
    try {
      report(id, name, f());
    } catch (const std::exception& e) {
      report(id, name, {false, std::string("exception: ") + e.what()});
    }
  };

  std::vector<CatalogueStats> runs;
  try {
    runs = catalogue_runs();
  } catch (const std::exception& e) {
    for (int id = 1; id <= 5; ++id) report(id, "catalogue runs", {false, std::string("exception: ") + e.what()});
  }
  if (!runs.empty()) {
    auto summarize = [&](auto value, auto tol, const char* f) {
      Verdict v;
      std::ostringstream d;
      for (const auto& s : runs) {
        const double x = value(s), t = tol(s);
        if (!(x <= t)) v.pass = false;
        d << s.name << ' ' << fmt(f, x) << "; ";
      }
      v.detail = d.str();
      return v;
    };
    report(1, "mass conservation (<= 1e-12)", summarize([](auto& s) { return s.mass; }, [](auto&) { return 1e-12; }, "%.2e"));
    report(2, "density max principle (+-1e-12)", summarize([](auto& s) { return s.bounds; }, [](auto&) { return 1e-12; }, "%.2e"));
    report(3, "unit constraint (<= 1e-14)", summarize([](auto& s) { return s.unit; }, [](auto&) { return 1e-14; }, "%.2e"));
    report(4, "incompressibility (1e-10 periodic / 1e-8 box)",
           summarize([](auto& s) { return s.div; }, [](auto& s) { return s.div_tol; }, "%.2e"));
    report(5, "energy dissipation (1e-6 max(1, E0) per step)",
           summarize([](auto& s) { return s.energy; }, [](auto& s) { return s.energy_tol; }, "%.2e"));
  }
  guarded(6, "energy identity under joint refinement (factor >= 3)", energy_identity_refinement);
  guarded(7, "constraint identity order in [1.8, 2.2]", constraint_identity_order);
  guarded(8, "harmonic-map stationarity (<= 1e-3)", harmonic_map_stationarity);
  guarded(9, "Taylor-Green decay (2%)", taylor_green_decay);
  guarded(10, "MMS convergence", mms_convergence);
  guarded(11, "determinism and vacuum approximation", determinism_and_vacuum);
  guarded(12, "smallness sweep consistency", smallness_sweep);

  std::cout << (failed == 0 ? "all acceptance criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
