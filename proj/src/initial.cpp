#include "nematic/initial.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "nematic/errors.hpp"
#include "stencil.hpp"

namespace nematic {

namespace {

constexpr double kPi = std::numbers::pi;

struct ProfileDefaults {
  double amplitude;
  double director_amplitude;
};

ProfileDefaults defaults_for(const std::string& profile) {
  if (profile == "equilibrium") return {0.0, 0.0};
  if (profile == "circle_map") return {0.0, 0.0};
  if (profile == "perturbed_circle") return {0.0, 0.1};
  if (profile == "taylor_green") return {1.0, 0.0};
  if (profile == "vacuum_bump") return {0.1, 0.1};
  throw ConfigError("unknown initial profile '" + profile + "'");
}

// A unit vector orthogonal to v.
std::array<double, 3> orthogonal_unit(const std::array<double, 3>& v) {
  const std::array<double, 3> e = std::abs(v[0]) < 0.9 ? std::array<double, 3>{1, 0, 0}
                                                         : std::array<double, 3>{0, 1, 0};
  const double dot = e[0] * v[0] + e[1] * v[1] + e[2] * v[2];
  std::array<double, 3> w{e[0] - dot * v[0], e[1] - dot * v[1], e[2] - dot * v[2]};
  const double n = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
  for (double& x : w) x /= n;
  return w;
}

// prod_a sin^2(pi x_a / L_a): smooth, periodic, and flat-zero on box walls.
double wall_bump(const Grid& g, const std::array<double, 3>& x) {
  double b = 1.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double s = std::sin(kPi * x[a] / g.length(a));
    b *= s * s;
  }
  return b;
}

double distance_to_center(const Grid& g, const std::array<double, 3>& x) {
  double r2 = 0.0;
  for (int a = 0; a < g.dim(); ++a) {
    const double dx = x[a] - 0.5 * g.length(a);
    r2 += dx * dx;
  }
  return std::sqrt(r2);
}

double min_length(const Grid& g) {
  double l = g.length(0);
  for (int a = 1; a < g.dim(); ++a) l = std::min(l, g.length(a));
  return l;
}

void require_periodic(const Grid& g, const std::string& profile) {
  if (!g.periodic()) throw ConfigError("profile " + profile + " requires a periodic grid");
}

} // namespace

InitialSpec InitialSpec::resolve() const {
  const ProfileDefaults d = defaults_for(profile);
  InitialSpec r = *this;
  if (!r.amplitude) r.amplitude = d.amplitude;
  if (!r.director_amplitude) r.director_amplitude = d.director_amplitude;
  if (!(rho_level > 0.0)) throw ConfigError("rho_level must be positive");
  if (!(noise >= 0.0)) throw ConfigError("noise must be nonnegative");
  return r;
}

const std::vector<std::string>& catalogue() {
  static const std::vector<std::string> names{"equilibrium", "circle_map", "perturbed_circle",
                                              "taylor_green", "vacuum_bump"};
  return names;
}

double smooth_ramp(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

void velocity_from_stream_function(VectorField& u,
                                   const std::function<double(double, double, double)>& psi) {
  const Grid& g = u.grid();
  const double hx = g.spacing(0), hy = g.spacing(1);
  auto node = [&](int i, int j, int k) {
    const double z = g.dim() == 3 ? (k + 0.5) * g.spacing(2) : 0.0;
    return psi(i * hx, j * hy, z);
  };
  auto ux = u.component(0);
  for_each_face(g, 0, [&](int i, int j, int k, std::size_t f) {
    ux[f] = (node(i, j + 1, k) - node(i, j, k)) / hy;
  });
  auto uy = u.component(1);
  for_each_face(g, 1, [&](int i, int j, int k, std::size_t f) {
    uy[f] = -(node(i + 1, j, k) - node(i, j, k)) / hx;
  });
  if (g.dim() == 3)
    for (double& v : u.component(2)) v = 0.0;
  u.zero_walls();
}

FlowState make_initial_state(const Grid& g, const InitialSpec& raw,
                             const std::array<double, 3>& d_star) {
  const InitialSpec spec = raw.resolve();
  const double amp = *spec.amplitude;
  const double damp = *spec.director_amplitude;
  const std::string& name = spec.profile;
  FlowState s(g, d_star);
  for (double& v : s.rho.values()) v = spec.rho_level;

  const double k0 = 2.0 * kPi / g.length(0);
  const double k1 = 2.0 * kPi / g.length(1);
  const double k2 = g.dim() == 3 ? 2.0 * kPi / g.length(2) : 0.0;
  const auto perp = orthogonal_unit(d_star);

  // Seeded low-mode scalar noise eta(x), |eta| <= 1.
  std::vector<std::array<double, 5>> modes; // amplitude, kx, ky, kz, phase
  if (spec.noise > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int m = 0; m < 6; ++m) {
      std::array<double, 5> md{};
      md[0] = unit(rng) / 6.0;
      md[1] = std::round(2.0 * unit(rng)) * k0;
      md[2] = std::round(2.0 * unit(rng)) * k1;
      md[3] = std::round(2.0 * unit(rng)) * k2;
      md[4] = kPi * unit(rng);
      modes.push_back(md);
    }
  }
  auto eta = [&](const std::array<double, 3>& x) {
    double e = 0.0;
    for (const auto& md : modes) e += md[0] * std::cos(md[1] * x[0] + md[2] * x[1] + md[3] * x[2] + md[4]);
    return e;
  };

  auto set_director = [&](auto&& field) {
    for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
      const auto x = g.center(i, j, k);
      std::array<double, 3> v = field(x);
      if (spec.noise > 0.0) {
        const double e = spec.noise * eta(x);
        for (int m = 0; m < 3; ++m) v[m] += e * perp[m];
      }
      const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
      for (double& c : v) c /= len;
      s.d.set(n, v);
    });
  };

  auto tg_stream = [&](double x, double y, double z) {
    double v = amp * std::sin(k0 * x) * std::sin(k1 * y) / k1;
    if (g.dim() == 3) v *= std::cos(k2 * z);
    return v;
  };

  if (name == "equilibrium") {
    set_director([&](const std::array<double, 3>&) { return d_star; });
  } else if (name == "circle_map") {
    require_periodic(g, name);
    set_director([&](const std::array<double, 3>& x) {
      return std::array<double, 3>{std::cos(k0 * x[0]), std::sin(k0 * x[0]), 0.0};
    });
    if (amp != 0.0) velocity_from_stream_function(s.u, tg_stream);
  } else if (name == "perturbed_circle") {
    require_periodic(g, name);
    set_director([&](const std::array<double, 3>& x) {
      return std::array<double, 3>{std::cos(k0 * x[0]) + damp, std::sin(k0 * x[0]), 0.5 * damp};
    });
    if (amp != 0.0) velocity_from_stream_function(s.u, tg_stream);
  } else if (name == "taylor_green") {
    require_periodic(g, name);
    set_director([&](const std::array<double, 3>& x) {
      const double b = damp * wall_bump(g, x);
      return std::array<double, 3>{d_star[0] + b * perp[0], d_star[1] + b * perp[1],
                                   d_star[2] + b * perp[2]};
    });
    velocity_from_stream_function(s.u, tg_stream);
  } else if (name == "vacuum_bump") {
    const double L = min_length(g);
    const double r0 = 0.15 * L;
    const double w = 0.1 * L;
    const double margin = std::max(0.08 * L, 4.0 * g.min_spacing());
    // Velocity and director perturbation vanish on a neighborhood of the
    // vacuum disk wide enough for every stencil, so the initial data satisfy
    // the compatibility condition there.
    auto active = [&](const std::array<double, 3>& x) {
      return smooth_ramp((distance_to_center(g, x) - r0 - margin) / w);
    };
    for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
      s.rho[n] = spec.rho_level * smooth_ramp((distance_to_center(g, g.center(i, j, k)) - r0) / w);
    });
    set_director([&](const std::array<double, 3>& x) {
      const double b = damp * active(x) * wall_bump(g, x);
      return std::array<double, 3>{d_star[0] + b * perp[0], d_star[1] + b * perp[1],
                                   d_star[2] + b * perp[2]};
    });
    if (amp != 0.0)
      velocity_from_stream_function(s.u, [&](double x, double y, double z) {
        const std::array<double, 3> p{x, y, z};
        return amp * L / (2.0 * kPi) * active(p) * wall_bump(g, p);
      });
  } else {
    throw ConfigError("unknown initial profile '" + name + "'");
  }
  return s;
}

} // namespace nematic
