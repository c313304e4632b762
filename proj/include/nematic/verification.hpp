#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nematic/config.hpp"
#include "nematic/dynamics.hpp"
#include "nematic/state.hpp"

namespace nematic {

// ---- compatibility condition ------------------------------------------------

struct CompatibilityReport {
  CellVectorField g0;             ///< LHS / sqrt(max(rho0, 1e-30))
  CellVectorField lhs;            ///< -nu Lap u0 - grad p0 - lambda div(grad d0 (.) grad d0)
  double g0_norm = 0.0;           ///< ||g0||_2
  std::vector<std::size_t> violations; ///< rho0 < 1e-12 and |LHS| > 1e-8
};

/// Evaluates the compatibility condition with its own centered stencils.
/// `p0` is the physical pressure (not the effective one stored in FlowState).
/// Throws CompatibilityError when violations exist and `reject` is set.
CompatibilityReport compatibility_residual(const ScalarField& rho0, const VectorField& u0,
                                           const ScalarField& p0, const DirectorField& d0,
                                           const SolverConfig& cfg, bool reject = true);

/// Same, starting from a FlowState whose `p` is the effective pressure.
CompatibilityReport compatibility_residual(const FlowState& s, const SolverConfig& cfg,
                                           bool reject = true);

// ---- manufactured solutions ---------------------------------------------------

enum class MmsCase { Smooth, Equilibrium };

struct MmsOptions {
  MmsCase which = MmsCase::Smooth;
  double horizon = 0.2;
  double dt_factor = 0.1; ///< dt = dt_factor * h^2, rounded so steps hit the horizon
};

struct MmsTable {
  std::vector<int> cells;
  std::vector<double> err_rho, err_u, err_d;
  std::vector<double> order_rho, order_u, order_d; ///< between consecutive levels
  std::vector<int> steps;
  double seconds = 0.0;
};

/// Runs the forced system on periodic [0, 2 pi)^2 at each resolution and
/// returns L2 errors at the horizon and observed orders. Throws
/// VerificationError unless the refinements are strictly increasing with at
/// least three entries.
MmsTable mms_run(const SolverConfig& cfg, const std::vector<int>& refinements,
                 const MmsOptions& opt = {});

/// Violated bands: any order < 0.8, velocity/director orders outside
/// [1.7, 2.3]. Empty when the table passes.
std::vector<std::string> mms_failures(const MmsTable& t);

void write_mms_csv(std::ostream& out, const MmsTable& t, const SolverConfig& cfg);

// ---- uniqueness distance --------------------------------------------------------

struct Distance {
  double rho = 0.0; ///< ||rho_a - rho_b||_{3/2}
  double u = 0.0;   ///< ||sqrt(rho_b) (u_a - u_b)||_2
  double d = 0.0;   ///< ||grad (d_a - d_b)||_2
  /// sqrt(rho^2 + u^2 + d^2).
  double total() const;
};

Distance uniqueness_distance(const FlowState& a, const FlowState& b);

/// L^p norm (sum |f|^p vol)^(1/p).
double lp_norm(const ScalarField& f, double p);

// ---- vacuum approximation ---------------------------------------------------------

struct VacuumCompareOptions {
  std::vector<int> j_list{10, 100, 1000};
  double horizon = 0.1;
  int output_every = 5; ///< steps between compared output times
};

struct VacuumPair {
  int j = 0, k = 0;
  Distance sup; ///< componentwise sup over output times
};

struct VacuumCompareTable {
  double dt = 0.0;
  int steps = 0;
  std::vector<VacuumPair> pairs;
  /// Pairs (j, k_max) whose distances fail to decrease as j grows beyond
  /// the 1e-6 noise floor.
  std::vector<std::string> warnings;
};

/// Runs the base configuration with rho0 replaced by rho0 + 1/j for every j
/// (one shared fixed dt) and reports pairwise sup distances.
VacuumCompareTable vacuum_approx_compare(const RunConfig& base,
                                         const VacuumCompareOptions& opt = {});

void write_vacuum_csv(std::ostream& out, const VacuumCompareTable& t, const RunConfig& base);

// ---- twin runs -----------------------------------------------------------------------

struct TwinOptions {
  double sigma = 0.0;
  double horizon = 0.5;
  std::int64_t max_steps = -1; ///< negative: run to the horizon
  bool density_only = false;
};

struct TwinResult {
  std::vector<double> times;
  std::vector<Distance> distances;
  double max_distance = 0.0;
  double growth_rate = 0.0; ///< least-squares slope of log distance
  int steps = 0;
  bool bitwise_identical = true;
};

/// Runs the configuration twice, the second copy perturbed at scale sigma.
/// sigma = 0 requires bitwise equality at every step (DeterminismError
/// otherwise). Throws VerificationError for sigma outside [0, 1e-6].
TwinResult twin_run_divergence(const RunConfig& cfg, const TwinOptions& opt);

/// FNV-1a of the resolved configuration text.
std::uint64_t config_hash(const std::string& text);

} // namespace nematic
