#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace nematic {

enum class Boundary { Periodic, DirichletBox };

std::string to_string(Boundary b);
Boundary boundary_from_string(std::string_view s);

/// Uniform structured box of cells in 2 or 3 dimensions.
///
/// Scalars and directors live at cell centers; velocity components live on
/// the faces normal to their axis (MAC layout). Along axis c the c-faces are
/// numbered 0..cells(c)-1 on a periodic grid (face i is the low face of cell i)
/// and 0..cells(c) on a DirichletBox grid, where faces 0 and cells(c) are walls.
/// Axes at or beyond dim() are inert: one cell of unit length.
class Grid {
public:
  Grid(int dim, std::array<int, 3> cells, std::array<double, 3> length,
       Boundary boundary);

  /// Square/cubic periodic or box grid with n cells of extent `length` per axis.
  static Grid uniform(int dim, int n, double length, Boundary boundary);

  int dim() const noexcept { return dim_; }
  int cells(int axis) const noexcept { return cells_[axis]; }
  const std::array<int, 3>& cells() const noexcept { return cells_; }
  double length(int axis) const noexcept { return length_[axis]; }
  double spacing(int axis) const noexcept { return spacing_[axis]; }
  double min_spacing() const noexcept;
  Boundary boundary() const noexcept { return boundary_; }
  bool periodic() const noexcept { return boundary_ == Boundary::Periodic; }

  std::size_t cell_count() const noexcept { return count_; }
  double cell_volume() const noexcept { return cell_volume_; }
  double volume() const noexcept;
  std::size_t stride(int axis) const noexcept { return stride_[axis]; }

  std::size_t index(int i, int j, int k) const noexcept {
    return static_cast<std::size_t>(i) +
           stride_[1] * static_cast<std::size_t>(j) +
           stride_[2] * static_cast<std::size_t>(k);
  }
  std::array<double, 3> center(int i, int j, int k) const noexcept;

  std::array<int, 3> face_extent(int component) const noexcept {
    auto e = cells_;
    if (!periodic()) e[component] += 1;
    return e;
  }
  std::size_t face_count(int component) const noexcept {
    if (component >= dim_) return 0;
    const auto e = face_extent(component);
    return static_cast<std::size_t>(e[0]) * e[1] * e[2];
  }
  std::size_t face_index(int component, int i, int j, int k) const noexcept {
    const std::size_t ex = static_cast<std::size_t>(cells_[0]) + (!periodic() && component == 0);
    const std::size_t ey = static_cast<std::size_t>(cells_[1]) + (!periodic() && component == 1);
    return static_cast<std::size_t>(i) +
           ex * (static_cast<std::size_t>(j) + ey * static_cast<std::size_t>(k));
  }
  std::array<double, 3> face_center(int component, int i, int j, int k) const noexcept;
  /// True for the two wall faces of a DirichletBox along `component`.
  bool is_wall_face(int component, int along) const noexcept {
    return !periodic() && (along == 0 || along == cells_[component]);
  }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  int dim_;
  std::array<int, 3> cells_;
  std::array<double, 3> length_;
  std::array<double, 3> spacing_;
  Boundary boundary_;
  std::array<std::size_t, 3> stride_;
  std::size_t count_;
  double cell_volume_;
};

/// Calls f(i, j, k, index) for every cell in storage order.
template <class F> void for_each_cell(const Grid& g, F&& f) {
  std::size_t n = 0;
  for (int k = 0; k < g.cells(2); ++k)
    for (int j = 0; j < g.cells(1); ++j)
      for (int i = 0; i < g.cells(0); ++i, ++n) f(i, j, k, n);
}

/// Calls f(i, j, k, index) for every c-face in storage order.
template <class F> void for_each_face(const Grid& g, int c, F&& f) {
  const auto e = g.face_extent(c);
  std::size_t n = 0;
  for (int k = 0; k < e[2]; ++k)
    for (int j = 0; j < e[1]; ++j)
      for (int i = 0; i < e[0]; ++i, ++n) f(i, j, k, n);
}

} // namespace nematic
