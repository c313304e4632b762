#include "nematic/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "nematic/director.hpp"
#include "nematic/errors.hpp"
#include "nematic/format.hpp"

namespace nematic {

BasicEnergy basic_energy(const FlowState& s) {
  const double k = l2_norm(s.u, &s.rho);
  const double e = l2_norm(discrete_gradient(s.d));
  return {k * k, e * e};
}

DissipationTerms dissipation_terms(const FlowState& s) {
  DissipationTerms t;
  t.grad_u = grad_norm_sq(s.u);
  const double lap = l2_norm(discrete_laplacian(s.d));
  t.lap_d = lap * lap;
  const auto grad = discrete_gradient(s.d);
  const Grid& g = s.grid();
  double q = 0.0;
  for (std::size_t n = 0; n < g.cell_count(); ++n) {
    double gsq = 0.0;
    for (int m = 0; m < 3; ++m)
      for (int a = 0; a < g.dim(); ++a) gsq += grad[m].axis[a][n] * grad[m].axis[a][n];
    q += gsq * gsq;
  }
  t.quartic = q * g.cell_volume();
  return t;
}

double energy_identity_residual(const FlowState& prev, const FlowState& next, double dt,
                                const SolverConfig& cfg) {
  const BasicEnergy e0 = basic_energy(prev);
  const BasicEnergy e1 = basic_energy(next);
  const DissipationTerms d0 = dissipation_terms(prev);
  const DissipationTerms d1 = dissipation_terms(next);
  auto rate = [&](const DissipationTerms& d) {
    return 2.0 * cfg.nu * d.grad_u + 2.0 * cfg.lambda * cfg.gamma * (d.lap_d - d.quartic);
  };
  const double eb0 = e0.kinetic + cfg.lambda * e0.elastic;
  const double eb1 = e1.kinetic + cfg.lambda * e1.elastic;
  return (eb1 - eb0) / dt + 0.5 * (rate(d0) + rate(d1));
}

double hessian_norm_sq(const ScalarField& f) {
  const GradientField g1 = discrete_gradient(f);
  const Grid& g = f.grid();
  double s = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    ScalarField fa(g);
    std::copy(g1.axis[a].begin(), g1.axis[a].end(), fa.values().begin());
    const double n = l2_norm(discrete_gradient(fa));
    s += n * n;
  }
  return s;
}

namespace {

double sq(double v) { return v * v; }

double vector_hessian_sq(const CellVectorField& v, int ncomp) {
  double s = 0.0;
  for (int k = 0; k < ncomp; ++k) {
    ScalarField f(v.grid());
    std::copy(v.component(k).begin(), v.component(k).end(), f.values().begin());
    s += hessian_norm_sq(f);
  }
  return s;
}

VectorField difference(const VectorField& a, const VectorField& b, double scale) {
  VectorField out(a.grid());
  for (int c = 0; c < a.grid().dim(); ++c) {
    auto o = out.component(c);
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = (a.component(c)[n] - b.component(c)[n]) * scale;
  }
  return out;
}

CellVectorField difference(const DirectorField& a, const DirectorField& b, double scale) {
  CellVectorField out(a.grid());
  for (int k = 0; k < 3; ++k) {
    auto o = out.component(k);
    for (std::size_t n = 0; n < o.size(); ++n) o[n] = (a.component(k)[n] - b.component(k)[n]) * scale;
  }
  return out;
}

} // namespace

LedgerSample EnergyLedger::sample(const FlowState& s, double dt) const {
  LedgerSample x;
  const Grid& g = s.grid();
  x.u_sq = sq(l2_norm(s.u));
  x.grad_u = grad_norm_sq(s.u);
  x.hess_u = vector_hessian_sq(s.u.centered(), g.dim());
  x.grad_d = sq(l2_norm(discrete_gradient(s.d)));
  const CellVectorField lap = discrete_laplacian(s.d);
  x.lap_d = sq(l2_norm(lap));
  x.hess_d = vector_hessian_sq(s.d.vectors(), 3);
  for (int k = 0; k < 3; ++k) {
    ScalarField lk(g);
    std::copy(lap.component(k).begin(), lap.component(k).end(), lk.values().begin());
    x.grad3_d += sq(l2_norm(discrete_gradient(lk)));
  }
  x.grad_p = sq(l2_norm(discrete_gradient(s.p)));
  x.grad_rho = sq(l2_norm(discrete_gradient(s.rho)));

  if (prev_ && dt > 0.0) {
    const double inv = 1.0 / dt;
    const VectorField ut = difference(s.u, prev_->u, inv);
    x.sqrt_rho_ut = sq(l2_norm(ut, &s.rho));
    x.grad_ut = grad_norm_sq(ut);
    ScalarField rt(g);
    for (std::size_t n = 0; n < g.cell_count(); ++n) rt[n] = (s.rho[n] - prev_->rho[n]) * inv;
    x.rho_t = sq(l2_norm(rt));
    x.hess_dt = vector_hessian_sq(difference(s.d, prev_->d, inv), 3);
    if (prev2_ && prev_dt_ > 0.0) {
      const CellVectorField d1 = difference(s.d, prev_->d, inv);
      const CellVectorField d0 = difference(prev_->d, prev2_->d, 1.0 / prev_dt_);
      CellVectorField dtt(g);
      const double w = 2.0 / (dt + prev_dt_);
      for (int k = 0; k < 3; ++k)
        for (std::size_t n = 0; n < g.cell_count(); ++n)
          dtt.component(k)[n] = w * (d1.component(k)[n] - d0.component(k)[n]);
      x.d_tt = sq(l2_norm(dtt));
    }
  }
  return x;
}

void EnergyLedger::update(const FlowState& s, double dt) {
  const bool first = updates_ == 0;
  if (first) {
    const BasicEnergy e = basic_energy(s);
    c0_ = e.kinetic + e.elastic;
    dt = 0.0;
  }
  const LedgerSample cur = sample(s, dt);

  if (!first) {
    const double h = 0.5 * dt;
    auto trap = [&](double& acc, double a, double b) { acc += h * (a + b); };
    auto trap_opt = [&](double& acc, const std::optional<double>& a, const std::optional<double>& b) {
      if (a && b) acc += h * (*a + *b);
    };
    trap(int_.grad_u, last_.grad_u, cur.grad_u);
    trap(int_.lap_d, last_.lap_d, cur.lap_d);
    trap(int_.hess_u, last_.hess_u, cur.hess_u);
    trap(int_.grad_p, last_.grad_p, cur.grad_p);
    trap(int_.grad3_d, last_.grad3_d, cur.grad3_d);
    trap_opt(int_.sqrt_rho_ut, last_.sqrt_rho_ut, cur.sqrt_rho_ut);
    trap_opt(int_.grad_ut, last_.grad_ut, cur.grad_ut);
    trap_opt(int_.hess_dt, last_.hess_dt, cur.hess_dt);
    trap_opt(int_.d_tt, last_.d_tt, cur.d_tt);
    time_ += dt;
  }

  sup_.grad_u = std::max(sup_.grad_u, cur.grad_u);
  sup_.hess_d = std::max(sup_.hess_d, cur.hess_d);
  sup_.hess_u = std::max(sup_.hess_u, cur.hess_u);
  sup_.grad_p = std::max(sup_.grad_p, cur.grad_p);
  sup_.grad3_d = std::max(sup_.grad3_d, cur.grad3_d);
  sup_.grad_rho = std::max(sup_.grad_rho, cur.grad_rho);
  if (cur.sqrt_rho_ut) sup_.sqrt_rho_ut = std::max(sup_.sqrt_rho_ut, *cur.sqrt_rho_ut);
  if (cur.rho_t) sup_.rho_t = std::max(sup_.rho_t, *cur.rho_t);

  sup_e1_ = std::max(sup_e1_, cur.grad_u + cur.hess_d);
  if (cur.sqrt_rho_ut) {
    have_first_ = true;
    sup_e2_ = std::max(sup_e2_, *cur.sqrt_rho_ut + cur.hess_u + cur.grad_p + cur.grad3_d);
    const double u_h2 = cur.u_sq + cur.grad_u + cur.hess_u;
    const double gd_h2 = cur.grad_d + cur.hess_d + cur.grad3_d;
    sup_e_ = std::max(sup_e_, cur.grad_rho + *cur.rho_t + u_h2 + gd_h2 + cur.grad_p);
  }
  if (cur.d_tt) have_second_ = true;

  prev2_ = std::move(prev_);
  prev_ = s;
  prev_dt_ = dt;
  last_ = cur;
  ++updates_;
}

double EnergyLedger::e1() const noexcept {
  return sup_e1_ + int_.sqrt_rho_ut + int_.hess_u + int_.grad_p + int_.grad3_d;
}

double EnergyLedger::e2() const noexcept {
  return sup_e2_ + int_.grad_ut + int_.d_tt + int_.hess_dt;
}

double EnergyLedger::e_total() const noexcept {
  return sup_e_ + int_.grad_ut + int_.hess_dt;
}

EnergyLedger update_ledger(EnergyLedger ledger, const FlowState& s, double dt) {
  ledger.update(s, dt);
  return ledger;
}

std::string to_string(Smallness s) {
  switch (s) {
  case Smallness::SatisfiedN2: return "SatisfiedN2";
  case Smallness::SatisfiedN3: return "SatisfiedN3";
  case Smallness::NotSatisfied: return "NotSatisfied";
  }
  return "NotSatisfied";
}

Smallness smallness_check(double c0, double h1, int dim, double eps0) {
  if (c0 < 0.0 || h1 < 0.0 || eps0 < 0.0) throw Error("smallness_check needs nonnegative inputs");
  if (dim == 2) return c0 < eps0 ? Smallness::SatisfiedN2 : Smallness::NotSatisfied;
  if (dim == 3) return c0 * h1 < eps0 ? Smallness::SatisfiedN3 : Smallness::NotSatisfied;
  throw Error("smallness_check: dimension must be 2 or 3");
}

double h1_level(const FlowState& s) {
  double hess = 0.0;
  for (int k = 0; k < 3; ++k) hess += hessian_norm_sq(s.d.component_field(k));
  return grad_norm_sq(s.u) + hess;
}

namespace {

bool scan(std::span<const double> v, double cap) {
  for (double x : v)
    if (!std::isfinite(x) || std::abs(x) > cap) return false;
  return true;
}

} // namespace

InvariantReport invariant_report(const FlowState& s, const DensityBounds& bounds,
                                 const SolverConfig& cfg) {
  InvariantReport r;
  const Grid& g = s.grid();
  auto flag = [&](const char* name) {
    if (!r.blowup_flag) r.offending_field = name;
    r.blowup_flag = true;
  };
  if (!scan(s.rho.values(), cfg.blowup_cap)) flag("rho");
  for (int c = 0; c < g.dim(); ++c)
    if (!scan(s.u.component(c), cfg.blowup_cap)) flag("u");
  if (!scan(s.p.values(), cfg.blowup_cap)) flag("p");
  for (int k = 0; k < 3; ++k)
    if (!scan(s.d.component(k), cfg.blowup_cap)) flag("d");

  r.mass = s.rho.integral();
  r.min_rho = s.rho.min();
  r.max_rho = s.rho.max();
  r.max_unit_violation = s.d.max_unit_violation();
  bool u_finite = true;
  for (int c = 0; c < g.dim(); ++c)
    for (double v : s.u.component(c)) u_finite = u_finite && std::isfinite(v);
  if (u_finite) {
    const ScalarField div = discrete_divergence(s.u);
    for (double v : div.values()) r.max_div_u = std::max(r.max_div_u, std::abs(v));
  } else {
    r.max_div_u = std::numeric_limits<double>::quiet_NaN();
  }

  if (r.blowup_flag) r.violations.push_back("blow-up in " + r.offending_field);
  if (!(r.min_rho >= bounds.lower - 1e-12) || !(r.max_rho <= bounds.upper + 1e-12))
    r.violations.push_back("density left its initial bounds");
  if (!(r.max_div_u <= cfg.div_tol(g))) r.violations.push_back("divergence above div_tol");
  if (!(r.max_unit_violation <= cfg.unit_tol)) r.violations.push_back("unit-norm violation above unit_tol");
  r.within_tolerances = r.violations.empty();
  return r;
}

void write_csv_header(std::ostream& out) {
  out << "t,mass,min_rho,max_rho,kinetic,elastic,dissipation_u,dissipation_d,quartic,"
         "energy_identity_residual,max_div_u,max_unit_violation,E1,E2,blowup_flag\n";
}

void write_csv_row(std::ostream& out, const DiagnosticsRecord& r) {
  const double cols[] = {r.t,       r.mass,          r.min_rho,       r.max_rho,
                         r.kinetic, r.elastic,       r.dissipation_u, r.dissipation_d,
                         r.quartic, r.energy_identity_residual, r.max_div_u,
                         r.max_unit_violation, r.E1, r.E2};
  for (double c : cols) out << shortest(c) << ',';
  out << (r.blowup_flag ? 1 : 0) << '\n';
}

} // namespace nematic
