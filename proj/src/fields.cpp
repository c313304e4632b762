#include "nematic/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nematic/errors.hpp"
#include "stencil.hpp"

namespace nematic {

using detail::cell_neighbor;
using detail::kOutside;

ScalarField::ScalarField(const Grid& grid, double fill, Closure closure)
    : grid_(grid), closure_(closure), values_(grid.cell_count(), fill) {}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

double ScalarField::integral() const { return sum() * grid_.cell_volume(); }

CellVectorField::CellVectorField(const Grid& grid, std::array<double, 3> fill) : grid_(grid) {
  for (int k = 0; k < 3; ++k) comp_[k].assign(grid.cell_count(), fill[k]);
}

double CellVectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp_)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

VectorField::VectorField(const Grid& grid) : grid_(grid) {
  for (int c = 0; c < 3; ++c) comp_[c].assign(grid.face_count(c), 0.0);
}

CellVectorField VectorField::centered() const {
  CellVectorField out(grid_);
  for (int c = 0; c < grid_.dim(); ++c) {
    auto dst = out.component(c);
    const auto& src = comp_[c];
    for_each_cell(grid_, [&](int i, int j, int k, std::size_t n) {
      const std::array<int, 3> pos{i, j, k};
      dst[n] = 0.5 * (src[detail::face_of_cell(grid_, c, pos, 0)] +
                      src[detail::face_of_cell(grid_, c, pos, 1)]);
    });
  }
  return out;
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp_)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

void VectorField::zero_walls() {
  if (grid_.periodic()) return;
  for (int c = 0; c < grid_.dim(); ++c)
    for_each_face(grid_, c, [&](int i, int j, int k, std::size_t n) {
      const int along = (c == 0 ? i : c == 1 ? j : k);
      if (grid_.is_wall_face(c, along)) comp_[c][n] = 0.0;
    });
}

DirectorField::DirectorField(const Grid& grid, std::array<double, 3> boundary_value)
    : vec_(grid, boundary_value), boundary_(boundary_value) {}

ScalarField DirectorField::component_field(int k) const {
  ScalarField f(grid(), 0.0, Closure::fixed(boundary_[k]));
  std::copy(vec_.component(k).begin(), vec_.component(k).end(), f.values().begin());
  return f;
}

double DirectorField::max_unit_violation() const {
  double m = 0.0;
  for (std::size_t n = 0; n < size(); ++n) {
    const auto v = at(n);
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    const double dev = std::abs(len - 1.0);
    if (!(dev <= m)) m = dev; // NaN propagates
  }
  return m;
}

void DirectorField::normalize() {
  for (std::size_t n = 0; n < size(); ++n) {
    auto v = at(n);
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(len > 0.0)) throw ConstraintError("cannot normalize a zero director");
    for (double& x : v) x /= len;
    set(n, v);
  }
}

GradientField::GradientField(const Grid& g) : grid(g) {
  for (int a = 0; a < 3; ++a) axis[a].assign(a < g.dim() ? g.cell_count() : 0, 0.0);
}

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values)
    if (!std::isfinite(v)) throw FieldError(std::string("non-finite field: ") + what);
}

namespace {

void gradient_kernel(const Grid& g, std::span<const double> f, GradientField& out) {
  for (int a = 0; a < g.dim(); ++a) {
    const double h = g.spacing(a);
    const int n = g.cells(a);
    auto& dst = out.axis[a];
    for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
      const std::array<int, 3> pos{i, j, k};
      const int p = pos[a];
      if (g.periodic() || (p > 0 && p < n - 1)) {
        dst[idx] = (f[cell_neighbor(g, pos, a, 1)] - f[cell_neighbor(g, pos, a, -1)]) / (2.0 * h);
      } else if (p == 0) {
        dst[idx] = (-3.0 * f[idx] + 4.0 * f[cell_neighbor(g, pos, a, 1)] -
                    f[cell_neighbor(g, pos, a, 2)]) / (2.0 * h);
      } else {
        dst[idx] = (3.0 * f[idx] - 4.0 * f[cell_neighbor(g, pos, a, -1)] +
                    f[cell_neighbor(g, pos, a, -2)]) / (2.0 * h);
      }
    });
  }
}

void laplacian_kernel(const Grid& g, std::span<const double> f, Closure closure,
                      std::span<double> out) {
  std::array<double, 3> inv_h2{};
  for (int a = 0; a < g.dim(); ++a) inv_h2[a] = 1.0 / (g.spacing(a) * g.spacing(a));
  for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
    const std::array<int, 3> pos{i, j, k};
    const double c = f[idx];
    double acc = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      double side = 0.0;
      for (int off : {-1, 1}) {
        const auto nb = cell_neighbor(g, pos, a, off);
        if (nb != kOutside)
          side += f[nb];
        else
          side += closure.kind == Closure::Kind::Fixed ? closure.value : c;
      }
      acc += (side - 2.0 * c) * inv_h2[a];
    }
    out[idx] = acc;
  });
}

} // namespace

GradientField discrete_gradient(const ScalarField& f) {
  require_finite(f.values(), "gradient input");
  GradientField out(f.grid());
  gradient_kernel(f.grid(), f.values(), out);
  return out;
}

std::array<GradientField, 3> discrete_gradient(const DirectorField& d) {
  const Grid& g = d.grid();
  std::array<GradientField, 3> out{GradientField(g), GradientField(g), GradientField(g)};
  for (int k = 0; k < 3; ++k) {
    require_finite(d.component(k), "director");
    gradient_kernel(g, d.component(k), out[k]);
  }
  return out;
}

ScalarField discrete_divergence(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(g);
  for (int c = 0; c < g.dim(); ++c) require_finite(v.component(c), "velocity");
  for_each_cell(g, [&](int i, int j, int k, std::size_t idx) {
    const std::array<int, 3> pos{i, j, k};
    double acc = 0.0;
    for (int c = 0; c < g.dim(); ++c) {
      const auto u = v.component(c);
      acc += (u[detail::face_of_cell(g, c, pos, 1)] - u[detail::face_of_cell(g, c, pos, 0)]) /
             g.spacing(c);
    }
    out[idx] = acc;
  });
  return out;
}

ScalarField discrete_laplacian(const ScalarField& f) {
  require_finite(f.values(), "laplacian input");
  ScalarField out(f.grid());
  laplacian_kernel(f.grid(), f.values(), f.closure(), out.values());
  return out;
}

CellVectorField discrete_laplacian(const DirectorField& d) {
  CellVectorField out(d.grid());
  for (int k = 0; k < 3; ++k) {
    require_finite(d.component(k), "director");
    laplacian_kernel(d.grid(), d.component(k), Closure::fixed(d.boundary_value()[k]),
                     out.component(k));
  }
  return out;
}

VectorField discrete_laplacian(const VectorField& u) {
  const Grid& g = u.grid();
  VectorField out(g);
  for (int c = 0; c < g.dim(); ++c) {
    const auto src = u.component(c);
    require_finite(src, "velocity");
    auto dst = out.component(c);
    for_each_face(g, c, [&](int i, int j, int k, std::size_t idx) {
      const std::array<int, 3> pos{i, j, k};
      if (g.is_wall_face(c, pos[c])) {
        dst[idx] = 0.0;
        return;
      }
      const double v = src[idx];
      double acc = 0.0;
      for (int a = 0; a < g.dim(); ++a) {
        double side = 0.0;
        for (int off : {-1, 1}) {
          const auto nb = detail::face_neighbor(g, c, pos, a, off);
          side += nb != kOutside ? src[nb] : -v; // no-slip ghost
        }
        acc += (side - 2.0 * v) / (g.spacing(a) * g.spacing(a));
      }
      dst[idx] = acc;
    });
  }
  return out;
}

VectorField face_gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  for (int c = 0; c < g.dim(); ++c) {
    auto dst = out.component(c);
    for_each_face(g, c, [&](int i, int j, int k, std::size_t idx) {
      const std::array<int, 3> pos{i, j, k};
      const auto lo = detail::cell_of_face(g, c, pos, 0);
      const auto hi = detail::cell_of_face(g, c, pos, 1);
      dst[idx] = (lo == kOutside || hi == kOutside) ? 0.0 : (f[hi] - f[lo]) / g.spacing(c);
    });
  }
  return out;
}

VectorField average_to_faces(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  for (int c = 0; c < g.dim(); ++c) {
    auto dst = out.component(c);
    for_each_face(g, c, [&](int i, int j, int k, std::size_t idx) {
      const std::array<int, 3> pos{i, j, k};
      const auto lo = detail::cell_of_face(g, c, pos, 0);
      const auto hi = detail::cell_of_face(g, c, pos, 1);
      if (lo == kOutside)
        dst[idx] = f[hi];
      else if (hi == kOutside)
        dst[idx] = f[lo];
      else
        dst[idx] = 0.5 * (f[lo] + f[hi]);
    });
  }
  return out;
}

VectorField average_to_faces(const CellVectorField& v) {
  const Grid& g = v.grid();
  VectorField out(g);
  for (int c = 0; c < g.dim(); ++c) {
    const auto src = v.component(c);
    auto dst = out.component(c);
    for_each_face(g, c, [&](int i, int j, int k, std::size_t idx) {
      const std::array<int, 3> pos{i, j, k};
      const auto lo = detail::cell_of_face(g, c, pos, 0);
      const auto hi = detail::cell_of_face(g, c, pos, 1);
      dst[idx] = (lo == kOutside || hi == kOutside) ? 0.0 : 0.5 * (src[lo] + src[hi]);
    });
  }
  return out;
}

namespace {

void check_weight(const ScalarField* w, const Grid& g) {
  if (!w) return;
  if (!(w->grid() == g)) throw FieldError("weight lives on a different grid");
  for (double v : w->values())
    if (!(v >= 0.0)) throw FieldError("weight must be nonnegative (rho >= 0 violated)");
}

double weighted_sum_sq(std::span<const double> f, const ScalarField* w) {
  double s = 0.0;
  if (w) {
    for (std::size_t n = 0; n < f.size(); ++n) s += (*w)[n] * f[n] * f[n];
  } else {
    for (double v : f) s += v * v;
  }
  return s;
}

} // namespace

double l2_norm(const ScalarField& f, const ScalarField* weight) {
  check_weight(weight, f.grid());
  return std::sqrt(weighted_sum_sq(f.values(), weight) * f.grid().cell_volume());
}

double l2_norm(const CellVectorField& f, const ScalarField* weight) {
  check_weight(weight, f.grid());
  double s = 0.0;
  for (int k = 0; k < 3; ++k) s += weighted_sum_sq(f.component(k), weight);
  return std::sqrt(s * f.grid().cell_volume());
}

double l2_norm(const VectorField& f, const ScalarField* weight) {
  return l2_norm(f.centered(), weight);
}

double l2_norm(const DirectorField& f, const ScalarField* weight) {
  return l2_norm(f.vectors(), weight);
}

double l2_norm(const GradientField& f) {
  double s = 0.0;
  for (int a = 0; a < f.grid.dim(); ++a) s += weighted_sum_sq(f.axis[a], nullptr);
  return std::sqrt(s * f.grid.cell_volume());
}

double l2_norm(const std::array<GradientField, 3>& f) {
  double s = 0.0;
  for (const auto& gk : f) {
    const double n = l2_norm(gk);
    s += n * n;
  }
  return std::sqrt(s);
}

double grad_norm_sq(const VectorField& u) {
  const VectorField lap = discrete_laplacian(u);
  return -inner(lap, u);
}

double inner(const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * b[n];
  return s * a.grid().cell_volume();
}

double inner(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int c = 0; c < a.grid().dim(); ++c) {
    const auto x = a.component(c);
    const auto y = b.component(c);
    for (std::size_t n = 0; n < x.size(); ++n) s += x[n] * y[n];
  }
  return s * a.grid().cell_volume();
}

double inner(const GradientField& a, const GradientField& b) {
  double s = 0.0;
  for (int c = 0; c < a.grid.dim(); ++c)
    for (std::size_t n = 0; n < a.axis[c].size(); ++n) s += a.axis[c][n] * b.axis[c][n];
  return s * a.grid.cell_volume();
}

} // namespace nematic
