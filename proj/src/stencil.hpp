#pragma once

#include <array>
#include <cstddef>

#include "nematic/grid.hpp"

namespace nematic::detail {

constexpr std::ptrdiff_t kOutside = -1;

/// Cell index of the neighbor `off` cells away along `axis`, wrapping on
/// periodic grids; kOutside when it falls in the ghost layer of a box.
inline std::ptrdiff_t cell_neighbor(const Grid& g, std::array<int, 3> pos, int axis, int off) {
  const int n = g.cells(axis);
  int p = pos[axis] + off;
  if (p < 0 || p >= n) {
    if (!g.periodic()) return kOutside;
    p = ((p % n) + n) % n;
  }
  pos[axis] = p;
  return static_cast<std::ptrdiff_t>(g.index(pos[0], pos[1], pos[2]));
}

/// Index of the c-face `off` faces away along `axis` from face `pos`, using
/// the face layout of component c. Along a != c positions are cell positions
/// and leave the box through the walls (kOutside); along c positions run over
/// faces, so the walls themselves are valid.
inline std::ptrdiff_t face_neighbor(const Grid& g, int c, std::array<int, 3> pos, int axis, int off) {
  const auto e = g.face_extent(c);
  const int n = e[axis];
  int p = pos[axis] + off;
  if (p < 0 || p >= n) {
    if (!g.periodic()) return kOutside;
    p = ((p % n) + n) % n;
  }
  pos[axis] = p;
  return static_cast<std::ptrdiff_t>(g.face_index(c, pos[0], pos[1], pos[2]));
}

/// Cell adjacent to c-face `pos` on its low (side = 0) or high (side = 1)
/// side; kOutside beyond a wall.
inline std::ptrdiff_t cell_of_face(const Grid& g, int c, std::array<int, 3> pos, int side) {
  const int n = g.cells(c);
  int p = pos[c] - 1 + side;
  if (p < 0 || p >= n) {
    if (!g.periodic()) return kOutside;
    p = ((p % n) + n) % n;
  }
  pos[c] = p;
  return static_cast<std::ptrdiff_t>(g.index(pos[0], pos[1], pos[2]));
}

/// The c-face on the low (side = 0) or high (side = 1) side of a cell.
inline std::size_t face_of_cell(const Grid& g, int c, std::array<int, 3> pos, int side) {
  int p = pos[c] + side;
  if (g.periodic() && p == g.cells(c)) p = 0;
  pos[c] = p;
  return g.face_index(c, pos[0], pos[1], pos[2]);
}

} // namespace nematic::detail
