#include "nematic/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <fftw3.h>

#include "nematic/errors.hpp"
#include "stencil.hpp"

namespace nematic {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void remove_mean(std::span<double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  const double mean = s / static_cast<double>(a.size());
  for (double& v : a) v -= mean;
}

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

} // namespace

CgResult conjugate_gradient(const LinearOp& A, const LinearOp& M, std::span<const double> b,
                            std::span<double> x, const CgOptions& opt) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), Ap(n);
  CgResult res;
  res.rhs_norm = std::sqrt(dot(b, b));

  A(x, Ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
  if (opt.project_mean) remove_mean(r);

  auto done = [&](double rnorm) {
    if (rnorm == 0.0) return true;
    // Negligible in absolute terms: further iterations only chase round-off.
    if (opt.abs_tol_inf > 0.0 && max_abs(r) <= 1e-3 * opt.abs_tol_inf) return true;
    if (rnorm > opt.rel_tol * res.rhs_norm) return false;
    return opt.abs_tol_inf <= 0.0 || max_abs(r) <= opt.abs_tol_inf;
  };

  double rnorm = std::sqrt(dot(r, r));
  if (done(rnorm)) {
    res.residual = rnorm;
    res.converged = true;
    return res;
  }

  M(r, z);
  if (opt.project_mean) remove_mean(z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= opt.max_iter; ++it) {
    A(p, Ap);
    const double pAp = dot(p, Ap);
    if (!(pAp > 0.0)) {
      res.iterations = it;
      res.residual = rnorm;
      return res;
    }
    const double alpha = rz / pAp;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
    }
    if (opt.project_mean) remove_mean(r);
    rnorm = std::sqrt(dot(r, r));
    res.iterations = it;
    if (done(rnorm)) {
      res.residual = rnorm;
      res.converged = true;
      return res;
    }
    M(r, z);
    if (opt.project_mean) remove_mean(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  res.residual = rnorm;
  return res;
}

struct SpectralLaplacian::Plans {
  double* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

SpectralLaplacian::SpectralLaplacian(const Grid& grid) : grid_(grid), plans_(new Plans) {
  const int dim = grid.dim();
  const std::size_t count = grid.cell_count();
  // FFTW is row-major: the slowest axis comes first.
  int n[3];
  fftw_r2r_kind fk[3], bk[3];
  double normalization = 1.0;
  for (int r = 0; r < dim; ++r) {
    const int a = dim - 1 - r;
    n[r] = grid.cells(a);
    if (grid.periodic()) {
      fk[r] = FFTW_R2HC;
      bk[r] = FFTW_HC2R;
      normalization *= n[r];
    } else {
      fk[r] = FFTW_REDFT10;
      bk[r] = FFTW_REDFT01;
      normalization *= 2.0 * n[r];
    }
  }
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plans_->buf = fftw_alloc_real(count);
    plans_->fwd = fftw_plan_r2r(dim, n, plans_->buf, plans_->buf, fk, FFTW_ESTIMATE);
    plans_->bwd = fftw_plan_r2r(dim, n, plans_->buf, plans_->buf, bk, FFTW_ESTIMATE);
  }
  if (!plans_->fwd || !plans_->bwd) throw Error("FFTW planning failed");

  std::array<std::vector<double>, 3> eig;
  for (int a = 0; a < 3; ++a) {
    const int na = grid.cells(a);
    eig[a].assign(na, 0.0);
    if (a >= dim) continue;
    const double h = grid.spacing(a);
    for (int m = 0; m < na; ++m) {
      double s;
      if (grid.periodic()) {
        const int kk = m <= na / 2 ? m : na - m;
        s = std::sin(std::numbers::pi * kk / na);
      } else {
        s = std::sin(std::numbers::pi * m / (2.0 * na));
      }
      eig[a][m] = -4.0 / (h * h) * s * s;
    }
  }
  inv_eig_.assign(count, 0.0);
  for_each_cell(grid, [&](int i, int j, int k, std::size_t idx) {
    const double lam = eig[0][i] + eig[1][j] + eig[2][k];
    inv_eig_[idx] = (i == 0 && j == 0 && k == 0) ? 0.0 : 1.0 / (lam * normalization);
  });
}

SpectralLaplacian::~SpectralLaplacian() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plans_->fwd) fftw_destroy_plan(plans_->fwd);
  if (plans_->bwd) fftw_destroy_plan(plans_->bwd);
  if (plans_->buf) fftw_free(plans_->buf);
}

void SpectralLaplacian::solve(std::span<const double> b, std::span<double> x, double scale) {
  const std::size_t count = grid_.cell_count();
  double* buf = plans_->buf;
  for (std::size_t n = 0; n < count; ++n) buf[n] = b[n];
  fftw_execute(plans_->fwd);
  const double inv_scale = 1.0 / scale;
  for (std::size_t n = 0; n < count; ++n) buf[n] *= inv_eig_[n] * inv_scale;
  fftw_execute(plans_->bwd);
  for (std::size_t n = 0; n < count; ++n) x[n] = buf[n];
}

VariablePoisson::VariablePoisson(const Grid& grid, Preconditioner pc) : grid_(grid), pc_(pc) {
  if (pc_ == Preconditioner::Spectral) spectral_ = std::make_unique<SpectralLaplacian>(grid);
}

namespace {

std::array<int, 3> cell_position(const Grid& g, std::size_t n) {
  const int i = static_cast<int>(n % g.stride(1));
  const int j = static_cast<int>((n / g.stride(1)) % g.cells(1));
  const int k = static_cast<int>(n / g.stride(2));
  return {i, j, k};
}

// div(beta grad) as a fixed 2*dim-slot stencil: out[n] = sum_s w[s][n] (x[nb[s][n]] - x[n]).
// Slots that cross a box wall carry weight 0 and point at the cell itself.
struct AssembledStencil {
  int slots = 0;
  std::array<std::vector<std::size_t>, 6> nb;
  std::array<std::vector<double>, 6> w;
  std::vector<double> diag; ///< sum of weights

  AssembledStencil(const Grid& g, const VectorField& beta) : slots(2 * g.dim()) {
    const std::size_t count = g.cell_count();
    for (int s = 0; s < slots; ++s) {
      nb[s].resize(count);
      w[s].resize(count);
    }
    diag.assign(count, 0.0);
    for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
      const std::array<int, 3> pos{i, j, k};
      for (int c = 0; c < g.dim(); ++c) {
        const auto b = beta.component(c);
        const double inv_h2 = 1.0 / (g.spacing(c) * g.spacing(c));
        for (int side = 0; side < 2; ++side) {
          const int s = 2 * c + side;
          const auto other = detail::cell_neighbor(g, pos, c, side == 0 ? -1 : 1);
          if (other == detail::kOutside) {
            nb[s][n] = n;
            w[s][n] = 0.0;
          } else {
            nb[s][n] = static_cast<std::size_t>(other);
            w[s][n] = b[detail::face_of_cell(g, c, pos, side)] * inv_h2;
          }
          diag[n] += w[s][n];
        }
      }
    });
  }

  void apply(std::span<const double> x, std::span<double> out, double sign) const {
    const std::size_t count = diag.size();
    for (std::size_t n = 0; n < count; ++n) {
      double acc = 0.0;
      for (int s = 0; s < slots; ++s) acc += w[s][n] * (x[nb[s][n]] - x[n]);
      out[n] = sign * acc;
    }
  }
};

} // namespace

void VariablePoisson::apply(const VectorField& beta, std::span<const double> phi,
                            std::span<double> out) const {
  AssembledStencil(grid_, beta).apply(phi, out, 1.0);
}

CgResult VariablePoisson::solve(const VectorField& beta, std::span<const double> rhs,
                                std::span<double> phi, const CgOptions& opt) {
  const Grid& g = grid_;
  const std::size_t count = g.cell_count();

  // Solvability: the rhs must have zero mean up to round-off.
  double sum = 0.0, mag = 0.0;
  for (double v : rhs) {
    sum += v;
    mag += std::abs(v);
  }
  const double scale = std::max({mag, opt.rhs_scale, 1e-300});
  if (std::abs(sum) > 1e-9 * scale && std::abs(sum) > 1e-300) {
    std::ostringstream msg;
    msg << "incompatible Neumann data: rhs sum " << sum << " vs magnitude " << mag;
    throw CompatibilityError(msg.str(), {});
  }

  // SPD form: -div(beta grad) phi = -rhs.
  std::vector<double> b(rhs.begin(), rhs.end());
  for (double& v : b) v = -v;
  remove_mean(b);

  const auto stencil = std::make_shared<AssembledStencil>(g, beta);
  LinearOp A = [stencil](std::span<const double> x, std::span<double> y) {
    stencil->apply(x, y, -1.0);
  };

  LinearOp M;
  if (pc_ == Preconditioner::Spectral) {
    // D^-1/2 L^-1 D^-1/2 with D the cell mean of beta: exact for constant
    // beta and close to div(beta grad) when beta varies smoothly.
    auto scale = std::make_shared<std::vector<double>>(count);
    for (std::size_t n = 0; n < count; ++n) {
      double sum = 0.0;
      int cnt = 0;
      for (int c = 0; c < g.dim(); ++c) {
        const auto bc = beta.component(c);
        const std::array<int, 3> pos = cell_position(g, n);
        sum += bc[detail::face_of_cell(g, c, pos, 0)] + bc[detail::face_of_cell(g, c, pos, 1)];
        cnt += 2;
      }
      (*scale)[n] = 1.0 / std::sqrt(sum / cnt);
    }
    auto work = std::make_shared<std::vector<double>>(count);
    M = [this, scale, work](std::span<const double> r, std::span<double> z) {
      auto& t = *work;
      for (std::size_t n = 0; n < t.size(); ++n) t[n] = r[n] * (*scale)[n];
      spectral_->solve(t, z, -1.0);
      for (std::size_t n = 0; n < t.size(); ++n) z[n] *= (*scale)[n];
    };
  } else {
    auto diag = std::make_shared<std::vector<double>>(stencil->diag);
    M = [diag](std::span<const double> r, std::span<double> z) {
      for (std::size_t n = 0; n < r.size(); ++n) z[n] = r[n] / (*diag)[n];
    };
  }

  CgOptions o = opt;
  o.project_mean = true;
  std::fill(phi.begin(), phi.end(), 0.0);
  CgResult res = conjugate_gradient(A, M, b, phi, o);
  remove_mean(phi);
  return res;
}

} // namespace nematic
