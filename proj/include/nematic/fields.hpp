#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "nematic/grid.hpp"

namespace nematic {

/// Ghost-cell rule for a cell-centered scalar on a DirichletBox grid.
/// Periodic grids ignore it.
struct Closure {
  enum class Kind { ZeroGradient, Fixed };
  Kind kind = Kind::ZeroGradient;
  double value = 0.0;

  static Closure zero_gradient() { return {}; }
  static Closure fixed(double v) { return {Kind::Fixed, v}; }

  friend bool operator==(const Closure&, const Closure&) = default;
};

/// Cell-centered scalar (density, pressure, one director component).
class ScalarField {
public:
  explicit ScalarField(const Grid& grid, double fill = 0.0, Closure closure = {});

  const Grid& grid() const noexcept { return grid_; }
  const Closure& closure() const noexcept { return closure_; }
  void set_closure(Closure c) noexcept { closure_ = c; }

  std::size_t size() const noexcept { return values_.size(); }
  double& operator[](std::size_t n) noexcept { return values_[n]; }
  double operator[](std::size_t n) const noexcept { return values_[n]; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  double min() const;
  double max() const;
  double sum() const;
  /// Sum of value * cell volume.
  double integral() const;

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
  Grid grid_;
  Closure closure_;
  std::vector<double> values_;
};

/// Three components at every cell center; no constraint.
class CellVectorField {
public:
  explicit CellVectorField(const Grid& grid, std::array<double, 3> fill = {0.0, 0.0, 0.0});

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.cell_count(); }
  std::span<double> component(int k) noexcept { return comp_[k]; }
  std::span<const double> component(int k) const noexcept { return comp_[k]; }
  std::array<double, 3> at(std::size_t n) const noexcept {
    return {comp_[0][n], comp_[1][n], comp_[2][n]};
  }
  void set(std::size_t n, const std::array<double, 3>& v) noexcept {
    comp_[0][n] = v[0];
    comp_[1][n] = v[1];
    comp_[2][n] = v[2];
  }
  double max_abs() const;

  friend bool operator==(const CellVectorField&, const CellVectorField&) = default;

private:
  Grid grid_;
  std::array<std::vector<double>, 3> comp_;
};

/// MAC velocity: component c on the c-faces. Unused components (c >= dim)
/// are empty.
class VectorField {
public:
  explicit VectorField(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  std::span<double> component(int c) noexcept { return comp_[c]; }
  std::span<const double> component(int c) const noexcept { return comp_[c]; }

  /// Face values averaged to cell centers.
  CellVectorField centered() const;
  double max_abs() const;
  /// Sets every DirichletBox wall face to exactly zero.
  void zero_walls();

  friend bool operator==(const VectorField&, const VectorField&) = default;

private:
  Grid grid_;
  std::array<std::vector<double>, 3> comp_;
};

/// Unit director d at cell centers. On DirichletBox grids the ghost layer
/// holds the boundary value d0*.
class DirectorField {
public:
  DirectorField(const Grid& grid, std::array<double, 3> boundary_value);

  const Grid& grid() const noexcept { return vec_.grid(); }
  const std::array<double, 3>& boundary_value() const noexcept { return boundary_; }
  std::size_t size() const noexcept { return vec_.size(); }

  std::span<double> component(int k) noexcept { return vec_.component(k); }
  std::span<const double> component(int k) const noexcept { return vec_.component(k); }
  std::array<double, 3> at(std::size_t n) const noexcept { return vec_.at(n); }
  void set(std::size_t n, const std::array<double, 3>& v) noexcept { vec_.set(n, v); }

  const CellVectorField& vectors() const noexcept { return vec_; }
  CellVectorField& vectors() noexcept { return vec_; }

  /// Component k as a scalar whose ghosts hold d0*_k.
  ScalarField component_field(int k) const;
  /// max over cells of | |d| - 1 |.
  double max_unit_violation() const;
  /// Rescales every cell to unit length.
  void normalize();

  friend bool operator==(const DirectorField&, const DirectorField&) = default;

private:
  CellVectorField vec_;
  std::array<double, 3> boundary_;
};

/// Cell-centered gradient: axis[a] holds the a-derivative (a < dim).
struct GradientField {
  explicit GradientField(const Grid& g);
  Grid grid;
  std::array<std::vector<double>, 3> axis;
};

/// Throws FieldError naming `what` if any entry is NaN or infinite.
void require_finite(std::span<const double> values, const char* what);

/// Centered second-order differences; one-sided second order in the first
/// and last cell along each DirichletBox axis.
GradientField discrete_gradient(const ScalarField& f);
std::array<GradientField, 3> discrete_gradient(const DirectorField& d);

/// Face-differenced divergence at cell centers.
ScalarField discrete_divergence(const VectorField& v);

/// 2*dim+1 point Laplacian, ghost values from the closure.
ScalarField discrete_laplacian(const ScalarField& f);
/// Componentwise Laplacian with ghosts d0*.
CellVectorField discrete_laplacian(const DirectorField& d);
/// Face Laplacian of a MAC velocity with no-slip ghosts (-u across walls).
/// Wall faces of the result are zero.
VectorField discrete_laplacian(const VectorField& u);

/// Cell-to-face gradient, the negative adjoint of discrete_divergence.
/// Wall faces are zero.
VectorField face_gradient(const ScalarField& f);
/// Scalar sampled on the c-faces for each c: mean of the two adjacent cells,
/// the single adjacent cell on walls.
VectorField average_to_faces(const ScalarField& f);
/// Component c of a cell vector averaged to the c-faces; walls zero.
VectorField average_to_faces(const CellVectorField& v);

/// sqrt(sum weight*|f|^2 * cell volume). Throws FieldError if the weight has
/// negative entries.
double l2_norm(const ScalarField& f, const ScalarField* weight = nullptr);
/// Staggered components are averaged to centers first.
double l2_norm(const VectorField& f, const ScalarField* weight = nullptr);
double l2_norm(const CellVectorField& f, const ScalarField* weight = nullptr);
double l2_norm(const DirectorField& f, const ScalarField* weight = nullptr);
double l2_norm(const GradientField& f);
double l2_norm(const std::array<GradientField, 3>& f);

/// Discrete Dirichlet form <-Laplacian u, u>, i.e. ||grad u||_2^2 consistent
/// with the MAC viscous operator.
double grad_norm_sq(const VectorField& u);

/// Inner products with cell-volume weight.
double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
double inner(const GradientField& a, const GradientField& b);

} // namespace nematic
