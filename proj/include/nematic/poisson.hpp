#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nematic/fields.hpp"

namespace nematic {

struct CgOptions {
  double rel_tol = 1e-10;   ///< ||r||_2 <= rel_tol * ||b||_2
  double abs_tol_inf = 0.0; ///< and ||r||_inf <= abs_tol_inf when positive
  int max_iter = 1000;
  bool project_mean = false; ///< keep iterates in the mean-zero subspace
  /// Size of the terms the rhs was summed from; the solvability check of
  /// VariablePoisson judges round-off against it (default: sum |rhs|).
  double rhs_scale = 0.0;
};

struct CgResult {
  int iterations = 0;
  double residual = 0.0; ///< final ||r||_2
  double rhs_norm = 0.0;
  bool converged = false;
};

using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;

/// Preconditioned conjugate gradients for SPD A with preconditioner M ~ A^-1.
/// Sequential reductions, so iterates are bitwise reproducible.
CgResult conjugate_gradient(const LinearOp& A, const LinearOp& M, std::span<const double> b,
                            std::span<double> x, const CgOptions& opt);

/// Exact inverse of the constant-coefficient cell Laplacian with periodic
/// (real DFT) or zero-Neumann (DCT-II) closure, restricted to mean-zero data.
class SpectralLaplacian {
public:
  explicit SpectralLaplacian(const Grid& grid);
  ~SpectralLaplacian();
  SpectralLaplacian(const SpectralLaplacian&) = delete;
  SpectralLaplacian& operator=(const SpectralLaplacian&) = delete;

  /// x = (scale * L)^-1 b with the constant mode of x set to zero.
  void solve(std::span<const double> b, std::span<double> x, double scale = 1.0);

private:
  struct Plans;
  Grid grid_;
  std::unique_ptr<Plans> plans_;
  std::vector<double> inv_eig_;
};

enum class Preconditioner { Spectral, Jacobi };

/// Solver for div(beta grad phi) = rhs on cell centers with beta on faces,
/// Neumann walls or periodic closure, and mean-zero gauge on phi.
class VariablePoisson {
public:
  VariablePoisson(const Grid& grid, Preconditioner pc);

  /// Applies div(beta grad phi).
  void apply(const VectorField& beta, std::span<const double> phi, std::span<double> out) const;

  /// Throws CompatibilityError if rhs has a mean inconsistent with the
  /// closure beyond round-off.
  CgResult solve(const VectorField& beta, std::span<const double> rhs, std::span<double> phi,
                 const CgOptions& opt);

  Preconditioner preconditioner() const noexcept { return pc_; }

private:
  Grid grid_;
  Preconditioner pc_;
  std::unique_ptr<SpectralLaplacian> spectral_;
};

} // namespace nematic
