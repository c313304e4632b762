#include "nematic/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "nematic/errors.hpp"
#include "nematic/format.hpp"

namespace nematic {

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "inf" || v == "infinity") return std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ConfigError("invalid number for '" + key + "': '" + raw + "'");
  return x;
}

std::int64_t parse_int(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  std::int64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty())
    throw ConfigError("invalid integer for '" + key + "': '" + raw + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("invalid boolean for '" + key + "': '" + raw + "'");
}

std::array<double, 3> parse_vec3(const std::string& key, const std::string& raw) {
  const auto items = split_list(raw);
  if (items.size() != 3) throw ConfigError("'" + key + "' needs three comma-separated numbers");
  return {parse_double(key, items[0]), parse_double(key, items[1]), parse_double(key, items[2])};
}

// Reads one section, rejecting keys outside `allowed`.
class Section {
public:
  Section(const pt::ptree& root, const std::string& name, std::set<std::string> allowed)
      : name_(name) {
    const auto child = root.get_child_optional(name);
    if (!child) return;
    for (const auto& [key, node] : *child) {
      if (!node.empty()) throw ConfigError("nested key '" + name + "." + key + "'");
      if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name + "]");
      values_[key] = node.data();
    }
  }

  const std::string* find(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
  }
  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  void number(const std::string& key, double& out) const {
    if (const auto* v = find(key)) out = parse_double(qualified(key), *v);
  }
  void integer(const std::string& key, std::int64_t& out) const {
    if (const auto* v = find(key)) out = parse_int(qualified(key), *v);
  }
  void flag(const std::string& key, bool& out) const {
    if (const auto* v = find(key)) out = parse_bool(qualified(key), *v);
  }

private:
  std::string name_;
  std::map<std::string, std::string> values_;
};

std::string list3(const std::array<double, 3>& v, int n) {
  std::string s;
  for (int a = 0; a < n; ++a) {
    if (a) s += ", ";
    s += shortest(v[a]);
  }
  return s;
}

} // namespace

RunConfig parse_config(std::string_view text) {
  pt::ptree root;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  for (const auto& [name, node] : root) {
    if (name != "grid" && name != "physics" && name != "initial" && name != "run")
      throw ConfigError("unknown section [" + name + "]");
    if (node.empty() && !node.data().empty())
      throw ConfigError("key '" + name + "' outside any section");
  }

  RunConfig c;

  const Section grid(root, "grid", {"dim", "cells", "length", "boundary"});
  std::int64_t dim = 2;
  grid.integer("dim", dim);
  if (dim != 2 && dim != 3) throw ConfigError("grid.dim must be 2 or 3");
  std::array<int, 3> cells{32, 32, 32};
  std::array<double, 3> length{6.283185307179586, 6.283185307179586, 6.283185307179586};
  auto fill_axes = [&](const std::string& key, auto parse, auto& out) {
    const auto* raw = grid.find(key);
    if (!raw) return;
    const auto items = split_list(*raw);
    if (items.size() == 1) {
      for (auto& x : out) x = parse(items[0]);
    } else if (static_cast<std::int64_t>(items.size()) == dim) {
      for (int a = 0; a < dim; ++a) out[a] = parse(items[a]);
    } else {
      throw ConfigError("grid." + key + " needs 1 or dim entries");
    }
  };
  fill_axes("cells", [&](const std::string& s) {
    const auto n = parse_int("grid.cells", s);
    if (n < 4 || n > (1 << 20)) throw ConfigError("grid.cells must be in [4, 2^20]");
    return static_cast<int>(n);
  }, cells);
  fill_axes("length", [&](const std::string& s) { return parse_double("grid.length", s); }, length);
  Boundary boundary = Boundary::Periodic;
  if (const auto* b = grid.find("boundary")) {
    try {
      boundary = boundary_from_string(trim(*b));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (dim == 2) {
    cells[2] = 1;
    length[2] = 1.0;
  }
  try {
    c.grid = Grid(static_cast<int>(dim), cells, length, boundary);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  SolverConfig& s = c.solver;
  const Section phys(root, "physics",
                     {"nu", "lambda", "gamma", "d_star", "rho_floor", "viscosity"});
  phys.number("nu", s.nu);
  phys.number("lambda", s.lambda);
  phys.number("gamma", s.gamma);
  if (const auto* v = phys.find("d_star")) s.d_star = parse_vec3("physics.d_star", *v);
  if (const auto* v = phys.find("rho_floor")) {
    if (trim(*v) == "auto") {
      c.rho_floor_auto = true;
    } else {
      c.rho_floor_auto = false;
      s.rho_floor = parse_double("physics.rho_floor", *v);
    }
  }
  if (const auto* v = phys.find("viscosity")) {
    const std::string m = trim(*v);
    if (m == "explicit") s.viscosity = ViscosityMode::Explicit;
    else if (m == "implicit") s.viscosity = ViscosityMode::Implicit;
    else throw ConfigError("physics.viscosity must be explicit or implicit");
  }

  const Section init(root, "initial",
                     {"profile", "amplitude", "director_amplitude", "rho_level", "noise", "seed"});
  if (const auto* v = init.find("profile")) c.initial.profile = trim(*v);
  if (const auto* v = init.find("amplitude"))
    c.initial.amplitude = parse_double("initial.amplitude", *v);
  if (const auto* v = init.find("director_amplitude"))
    c.initial.director_amplitude = parse_double("initial.director_amplitude", *v);
  init.number("rho_level", c.initial.rho_level);
  init.number("noise", c.initial.noise);
  std::int64_t seed = static_cast<std::int64_t>(c.initial.seed);
  init.integer("seed", seed);
  if (seed < 0) throw ConfigError("initial.seed must be nonnegative");
  c.initial.seed = static_cast<std::uint64_t>(seed);
  c.initial = c.initial.resolve();
  if (c.initial.profile == "vacuum_bump" && !phys.find("viscosity"))
    s.viscosity = ViscosityMode::Implicit;

  const Section run(root, "run",
                    {"t_end", "steps", "dt", "safety", "snapshot_every", "eps0", "blowup_cap",
                     "unit_tol", "div_tol_periodic", "div_tol_box", "poisson_tol",
                     "preconditioner", "evolve_density", "evolve_velocity", "evolve_director",
                     "compatibility"});
  run.number("t_end", c.run.t_end);
  run.integer("steps", c.run.max_steps);
  if (const auto* v = run.find("dt")) {
    if (trim(*v) == "adaptive") {
      s.dt_policy.adaptive = true;
    } else {
      s.dt_policy.adaptive = false;
      s.dt_policy.fixed_dt = parse_double("run.dt", *v);
      if (!(s.dt_policy.fixed_dt > 0.0) || !std::isfinite(s.dt_policy.fixed_dt))
        throw ConfigError("run.dt must be 'adaptive' or a positive number");
    }
  }
  run.number("safety", s.dt_policy.safety);
  run.integer("snapshot_every", c.run.snapshot_every);
  run.number("eps0", s.eps0);
  run.number("blowup_cap", s.blowup_cap);
  run.number("unit_tol", s.unit_tol);
  run.number("div_tol_periodic", s.div_tol_periodic);
  run.number("div_tol_box", s.div_tol_box);
  run.number("poisson_tol", s.poisson_tol);
  if (const auto* v = run.find("preconditioner")) {
    const std::string m = trim(*v);
    if (m == "spectral") s.preconditioner = Preconditioner::Spectral;
    else if (m == "jacobi") s.preconditioner = Preconditioner::Jacobi;
    else throw ConfigError("run.preconditioner must be spectral or jacobi");
  }
  run.flag("evolve_density", s.evolve_density);
  run.flag("evolve_velocity", s.evolve_velocity);
  run.flag("evolve_director", s.evolve_director);
  if (const auto* v = run.find("compatibility")) {
    const std::string m = trim(*v);
    if (m == "reject") c.run.reject_incompatible = true;
    else if (m == "warn") c.run.reject_incompatible = false;
    else throw ConfigError("run.compatibility must be reject or warn");
  }

  if (!(c.run.t_end > 0.0)) throw ConfigError("run.t_end must be positive");
  if (!std::isfinite(c.run.t_end) && c.run.max_steps < 0)
    throw ConfigError("set run.t_end or run.steps");
  if (c.run.snapshot_every < 0) throw ConfigError("run.snapshot_every must be nonnegative");
  if (!(s.dt_policy.safety > 0.0 && s.dt_policy.safety <= 1.0))
    throw ConfigError("run.safety must be in (0, 1]");
  s.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_ini(const RunConfig& c) {
  const SolverConfig& s = c.solver;
  const Grid& g = c.grid;
  const int n = g.dim();
  std::ostringstream o;
  std::string cells;
  for (int a = 0; a < n; ++a) cells += (a ? ", " : "") + std::to_string(g.cells(a));
  o << "[grid]\n"
    << "dim = " << n << "\n"
    << "cells = " << cells << "\n"
    << "length = " << list3({g.length(0), g.length(1), g.length(2)}, n) << "\n"
    << "boundary = " << to_string(g.boundary()) << "\n\n";
  o << "[physics]\n"
    << "nu = " << shortest(s.nu) << "\n"
    << "lambda = " << shortest(s.lambda) << "\n"
    << "gamma = " << shortest(s.gamma) << "\n"
    << "d_star = " << list3(s.d_star, 3) << "\n"
    << "rho_floor = " << (c.rho_floor_auto ? std::string("auto") : shortest(s.rho_floor)) << "\n"
    << "viscosity = " << (s.viscosity == ViscosityMode::Implicit ? "implicit" : "explicit")
    << "\n\n";
  const InitialSpec init = c.initial.resolve();
  o << "[initial]\n"
    << "profile = " << init.profile << "\n"
    << "amplitude = " << shortest(*init.amplitude) << "\n"
    << "director_amplitude = " << shortest(*init.director_amplitude) << "\n"
    << "rho_level = " << shortest(init.rho_level) << "\n"
    << "noise = " << shortest(init.noise) << "\n"
    << "seed = " << init.seed << "\n\n";
  o << "[run]\n"
    << "t_end = " << (std::isfinite(c.run.t_end) ? shortest(c.run.t_end) : std::string("inf"))
    << "\n"
    << "steps = " << c.run.max_steps << "\n"
    << "dt = " << (s.dt_policy.adaptive ? std::string("adaptive") : shortest(s.dt_policy.fixed_dt))
    << "\n"
    << "safety = " << shortest(s.dt_policy.safety) << "\n"
    << "snapshot_every = " << c.run.snapshot_every << "\n"
    << "eps0 = " << shortest(s.eps0) << "\n"
    << "blowup_cap = " << shortest(s.blowup_cap) << "\n"
    << "unit_tol = " << shortest(s.unit_tol) << "\n"
    << "div_tol_periodic = " << shortest(s.div_tol_periodic) << "\n"
    << "div_tol_box = " << shortest(s.div_tol_box) << "\n"
    << "poisson_tol = " << shortest(s.poisson_tol) << "\n"
    << "preconditioner = "
    << (s.preconditioner == Preconditioner::Spectral ? "spectral" : "jacobi") << "\n"
    << "evolve_density = " << (s.evolve_density ? "true" : "false") << "\n"
    << "evolve_velocity = " << (s.evolve_velocity ? "true" : "false") << "\n"
    << "evolve_director = " << (s.evolve_director ? "true" : "false") << "\n"
    << "compatibility = " << (c.run.reject_incompatible ? "reject" : "warn") << "\n";
  return o.str();
}

double resolved_rho_floor(const RunConfig& c, const ScalarField& rho0) {
  if (!c.rho_floor_auto) return c.solver.rho_floor;
  return rho0.min() > 0.0 ? 0.0 : 1e-3 * rho0.max();
}

} // namespace nematic
