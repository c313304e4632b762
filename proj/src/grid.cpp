#include "nematic/grid.hpp"

#include <algorithm>
#include <cmath>

#include "nematic/errors.hpp"

namespace nematic {

std::string to_string(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "dirichlet_box";
}

Boundary boundary_from_string(std::string_view s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "dirichlet_box" || s == "dirichlet" || s == "box") return Boundary::DirichletBox;
  throw ConfigError("unknown boundary kind '" + std::string(s) +
                    "' (expected periodic or dirichlet_box)");
}

Grid::Grid(int dim, std::array<int, 3> cells, std::array<double, 3> length,
           Boundary boundary)
    : dim_(dim), cells_(cells), length_(length), boundary_(boundary) {
  if (dim != 2 && dim != 3) throw ConfigError("grid dimension must be 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      cells_[a] = 1;
      length_[a] = 1.0;
    } else {
      if (cells_[a] < 4) throw ConfigError("grid needs at least 4 cells per axis");
      if (!(length_[a] > 0.0) || !std::isfinite(length_[a]))
        throw ConfigError("grid extents must be positive and finite");
    }
    spacing_[a] = length_[a] / cells_[a];
  }
  stride_ = {1, static_cast<std::size_t>(cells_[0]),
             static_cast<std::size_t>(cells_[0]) * static_cast<std::size_t>(cells_[1])};
  count_ = stride_[2] * static_cast<std::size_t>(cells_[2]);
  cell_volume_ = 1.0;
  for (int a = 0; a < dim_; ++a) cell_volume_ *= spacing_[a];
}

Grid Grid::uniform(int dim, int n, double length, Boundary boundary) {
  return Grid(dim, {n, n, n}, {length, length, length}, boundary);
}

double Grid::min_spacing() const noexcept {
  double h = spacing_[0];
  for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[a]);
  return h;
}

double Grid::volume() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= length_[a];
  return v;
}

std::array<double, 3> Grid::center(int i, int j, int k) const noexcept {
  const int idx[3] = {i, j, k};
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim_; ++a) x[a] = (idx[a] + 0.5) * spacing_[a];
  return x;
}

std::array<double, 3> Grid::face_center(int component, int i, int j, int k) const noexcept {
  auto x = center(i, j, k);
  const int idx[3] = {i, j, k};
  x[component] = idx[component] * spacing_[component];
  return x;
}

} // namespace nematic
