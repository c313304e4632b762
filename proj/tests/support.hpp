#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "nematic/fields.hpp"
#include "nematic/initial.hpp"

namespace testing {

using namespace nematic;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline Grid periodic2(int n) { return Grid::uniform(2, n, kTwoPi, Boundary::Periodic); }
inline Grid box2(int n, double len = 1.0) { return Grid::uniform(2, n, len, Boundary::DirichletBox); }

inline ScalarField sample(const Grid& g, const std::function<double(double, double, double)>& f) {
  ScalarField s(g);
  for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
    const auto x = g.center(i, j, k);
    s[n] = f(x[0], x[1], x[2]);
  });
  return s;
}

inline DirectorField sample_director(const Grid& g, std::array<double, 3> boundary,
                                     const std::function<std::array<double, 3>(double, double, double)>& f) {
  DirectorField d(g, boundary);
  for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
    const auto x = g.center(i, j, k);
    d.set(n, f(x[0], x[1], x[2]));
  });
  return d;
}

inline void random_fill(std::span<double> v, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& x : v) x = dist(rng);
}

/// Divergence-free MAC field from a random smooth stream function that
/// vanishes on box walls.
inline VectorField random_solenoidal(const Grid& g, std::mt19937_64& rng, double amp = 1.0) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const double c0 = dist(rng), c1 = dist(rng), c2 = dist(rng), ph = std::numbers::pi * dist(rng);
  VectorField u(g);
  velocity_from_stream_function(u, [&](double x, double y, double) {
    const double kx = kTwoPi / g.length(0), ky = kTwoPi / g.length(1);
    double p = c0 * std::sin(kx * x) * std::sin(ky * y) + c1 * std::cos(kx * x + ph) * std::sin(2 * ky * y) +
               c2 * std::sin(2 * kx * x) * std::cos(ky * y + ph);
    if (!g.periodic()) {
      const double sx = std::sin(0.5 * kx * x), sy = std::sin(0.5 * ky * y);
      p *= sx * sx * sy * sy;
    }
    return amp * p;
  });
  return u;
}

/// Order of convergence from two errors at resolutions n and 2n.
inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

} // namespace testing
