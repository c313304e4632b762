#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "nematic/config.hpp"
#include "nematic/diagnostics.hpp"

namespace nematic {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitBlowup = 2;
inline constexpr int kExitVerify = 3;

struct RunOutcome {
  int exit_code = kExitOk;
  std::string status; ///< "completed", "blowup" or "rejected"
  std::string message;
  std::int64_t steps = 0;
  double t_final = 0.0;
  bool blew_up = false;
  double t_star = 0.0; ///< time at which the blow-up monitor fired
  std::string blowup_field;
  double c0 = 0.0;
  double h1_level = 0.0;
  Smallness verdict = Smallness::NotSatisfied;
  double max_e1 = 0.0;
};

/// Runs `cfg` to its horizon. With a non-empty `out_dir` writes
/// diagnostics.csv, snapshots/, summary.json and resolved.ini there.
/// Progress and warnings go to `log`.
RunOutcome run_simulation(const RunConfig& cfg, const std::filesystem::path& out_dir,
                          std::ostream& log);

struct VerifyOptions {
  double elastic_sign = 1.0; ///< -1 injects the sign-flip mutation
};

struct VerifyRow {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// The built-in invariant suite on fixed seeds.
std::vector<VerifyRow> run_verify_suite(const VerifyOptions& opt = {});
void print_verify_table(std::ostream& out, const std::vector<VerifyRow>& rows);

struct SweepRow {
  double amplitude = 0.0;
  double c0 = 0.0;
  double h1_level = 0.0;
  Smallness verdict = Smallness::NotSatisfied;
  double max_e1 = 0.0;
  bool blew_up = false;
  double t_final = 0.0;
};

/// Runs `base` once per amplitude (velocity and director amplitudes both set
/// to it), at most `threads` runs at a time; rows come back in input order.
/// Throws ConfigError unless the amplitudes are strictly increasing.
std::vector<SweepRow> run_sweep(const RunConfig& base, const std::vector<double>& amplitudes,
                                int threads);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const RunConfig& base);

/// Worker count: NEMATIC_THREADS if set and positive, else the hardware
/// concurrency, never below 1.
int worker_threads();

} // namespace nematic
