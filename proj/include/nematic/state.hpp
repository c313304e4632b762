#pragma once

#include <cstdint>

#include "nematic/fields.hpp"

namespace nematic {

/// The evolved tuple (t, rho, u, p, d). `p` is the effective pressure
/// p + lambda |grad d|^2 / 2.
struct FlowState {
  FlowState(const Grid& grid, std::array<double, 3> d_star)
      : rho(grid, 1.0), u(grid), p(grid), d(grid, d_star) {}

  const Grid& grid() const noexcept { return rho.grid(); }

  double t = 0.0;
  std::int64_t step = 0;
  ScalarField rho;
  VectorField u;
  ScalarField p;
  DirectorField d;

  friend bool operator==(const FlowState&, const FlowState&) = default;
};

} // namespace nematic
