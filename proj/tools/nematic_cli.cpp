#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nematic/driver.hpp"
#include "nematic/errors.hpp"
#include "nematic/verification.hpp"

namespace {

template <class T> std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    std::istringstream one(item);
    T v{};
    if (!(one >> v) || !(one >> std::ws).eof())
      throw nematic::ConfigError(std::string("invalid entry '") + item + "' in " + what);
    out.push_back(v);
  }
  return out;
}

// Writes to `path`, or stdout when empty.
template <class F> void emit(const std::string& path, F&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw nematic::ConfigError("cannot write " + path);
  write(f);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inhomogeneous nematic liquid crystal flow solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "nematic_run";
  auto* run = app.add_subcommand("run", "advance a configuration to its horizon");
  run->add_option("--config", config_path, "INI configuration")->required();
  run->add_option("--out", out_dir, "output directory");

  auto* verify = app.add_subcommand("verify", "run the built-in invariant suite");

  std::string cells = "32,64,128", mms_out;
  double nu = 1.0, lambda = 1.0, gamma = 1.0, horizon = 0.2;
  auto* mms = app.add_subcommand("mms", "manufactured-solution convergence table");
  mms->add_option("--cells", cells, "comma-separated resolutions");
  mms->add_option("--nu", nu);
  mms->add_option("--lambda", lambda);
  mms->add_option("--gamma", gamma);
  mms->add_option("--horizon", horizon, "final time");
  mms->add_option("--out", mms_out, "CSV file (default stdout)");

  std::string sweep_config, amplitudes, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "smallness sweep over initial amplitudes");
  sweep->add_option("--config", sweep_config, "INI configuration")->required();
  sweep->add_option("--amplitudes", amplitudes, "comma-separated, strictly increasing")->required();
  sweep->add_option("--out", sweep_out, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nematic::kExitConfig;
  }

  try {
    if (*run) {
      const nematic::RunConfig cfg = nematic::load_config(config_path);
      return nematic::run_simulation(cfg, out_dir, std::cerr).exit_code;
    }
    if (*verify) {
      const auto rows = nematic::run_verify_suite();
      nematic::print_verify_table(std::cout, rows);
      for (const auto& r : rows)
        if (!r.passed) {
          std::cerr << "invariant failed: " << r.name << '\n';
          return nematic::kExitVerify;
        }
      return nematic::kExitOk;
    }
    if (*mms) {
      nematic::SolverConfig cfg;
      cfg.nu = nu;
      cfg.lambda = lambda;
      cfg.gamma = gamma;
      cfg.validate();
      const auto table =
          nematic::mms_run(cfg, parse_list<int>(cells, "--cells"), {.horizon = horizon});
      emit(mms_out, [&](std::ostream& o) { nematic::write_mms_csv(o, table, cfg); });
      const auto failures = nematic::mms_failures(table);
      for (const auto& f : failures) std::cerr << "verification failure: " << f << '\n';
      return failures.empty() ? nematic::kExitOk : nematic::kExitVerify;
    }
    if (*sweep) {
      const nematic::RunConfig cfg = nematic::load_config(sweep_config);
      const auto rows = nematic::run_sweep(cfg, parse_list<double>(amplitudes, "--amplitudes"),
                                           nematic::worker_threads());
      emit(sweep_out, [&](std::ostream& o) { nematic::write_sweep_csv(o, rows, cfg); });
      return nematic::kExitOk;
    }
  } catch (const nematic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return nematic::kExitConfig;
  } catch (const nematic::VerificationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nematic::kExitConfig;
  } catch (const nematic::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return nematic::kExitBlowup;
  }
  return nematic::kExitOk;
}
