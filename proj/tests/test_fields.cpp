#include <doctest.h>

#include <sstream>

#include "nematic/errors.hpp"
#include "nematic/snapshot.hpp"
#include "support.hpp"

using namespace testing;

TEST_CASE("grid layout and validation") {
  const Grid p = periodic2(8);
  CHECK(p.cell_count() == 64);
  CHECK(p.face_count(0) == 64);
  CHECK(p.face_count(2) == 0);
  const Grid b = box2(8);
  CHECK(b.face_count(0) == 72);
  CHECK(b.is_wall_face(0, 0));
  CHECK(b.is_wall_face(0, 8));
  CHECK_FALSE(b.is_wall_face(0, 3));
  CHECK(b.face_center(0, 0, 3, 0)[0] == 0.0);
  CHECK(b.center(0, 0, 0)[0] == doctest::Approx(1.0 / 16));
  CHECK_THROWS_AS(Grid(4, {8, 8, 8}, {1, 1, 1}, Boundary::Periodic), Error);
  CHECK_THROWS_AS(Grid(2, {2, 8, 1}, {1, 1, 1}, Boundary::Periodic), Error);
  CHECK_THROWS_AS(Grid(2, {8, 8, 1}, {-1, 1, 1}, Boundary::Periodic), Error);
  CHECK(boundary_from_string("dirichlet_box") == Boundary::DirichletBox);
  CHECK_THROWS(boundary_from_string("neumann"));
}

TEST_CASE("gradient and laplacian converge at second order") {
  double eg[2], el[2];
  for (int level = 0; level < 2; ++level) {
    const Grid g = box2(32 << level);
    const ScalarField f = sample(g, [](double x, double y, double) { return std::sin(3 * x) * std::cos(2 * y); });
    const GradientField gr = discrete_gradient(f);
    double e = 0.0;
    for_each_cell(g, [&](int i, int j, int k, std::size_t n) {
      const auto x = g.center(i, j, k);
      e = std::max(e, std::abs(gr.axis[0][n] - 3 * std::cos(3 * x[0]) * std::cos(2 * x[1])));
      e = std::max(e, std::abs(gr.axis[1][n] + 2 * std::sin(3 * x[0]) * std::sin(2 * x[1])));
    });
    eg[level] = e;

    const Grid pg = periodic2(32 << level);
    const ScalarField q = sample(pg, [](double x, double y, double) { return std::sin(x) * std::cos(2 * y); });
    const ScalarField lap = discrete_laplacian(q);
    double m = 0.0;
    for (std::size_t n = 0; n < q.size(); ++n) m = std::max(m, std::abs(lap[n] + 5.0 * q[n]));
    el[level] = m;
  }
  CHECK(order(eg[0], eg[1]) == doctest::Approx(2.0).epsilon(0.1));
  CHECK(order(el[0], el[1]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("face gradient is the negative adjoint of divergence") {
  std::mt19937_64 rng(1);
  for (const Grid& g : {periodic2(12), box2(10), Grid::uniform(3, 6, 1.0, Boundary::DirichletBox),
                        Grid::uniform(3, 5, 2.0, Boundary::Periodic)}) {
    for (int trial = 0; trial < 5; ++trial) {
      ScalarField p(g);
      random_fill(p.values(), rng);
      VectorField u(g);
      for (int c = 0; c < g.dim(); ++c) random_fill(u.component(c), rng);
      u.zero_walls();
      const double lhs = inner(face_gradient(p), u);
      const double rhs = -inner(p, discrete_divergence(u));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("stream-function velocities are discretely divergence free") {
  std::mt19937_64 rng(2);
  for (const Grid& g : {periodic2(16), box2(16)}) {
    const VectorField u = random_solenoidal(g, rng);
    const ScalarField div = discrete_divergence(u);
    for (double v : div.values()) CHECK(std::abs(v) < 1e-12);
  }
}

TEST_CASE("vector laplacian is symmetric negative definite with no-slip walls") {
  std::mt19937_64 rng(3);
  const Grid g = box2(10);
  VectorField a(g), b(g);
  for (int c = 0; c < 2; ++c) {
    random_fill(a.component(c), rng);
    random_fill(b.component(c), rng);
  }
  a.zero_walls();
  b.zero_walls();
  CHECK(inner(discrete_laplacian(a), b) == doctest::Approx(inner(a, discrete_laplacian(b))).epsilon(1e-12));
  CHECK(grad_norm_sq(a) > 0.0);
}

TEST_CASE("grad_norm_sq of a Taylor-Green field") {
  // u = (sin x cos y, -cos x sin y): |grad u|^2 integrates to 4 pi^2.
  const Grid g = periodic2(64);
  VectorField u(g);
  velocity_from_stream_function(u, [](double x, double y, double) { return std::sin(x) * std::sin(y); });
  CHECK(grad_norm_sq(u) == doctest::Approx(4 * std::numbers::pi * std::numbers::pi).epsilon(2e-3));
}

TEST_CASE("weighted norms") {
  const Grid g = periodic2(8);
  ScalarField f(g, 2.0), w(g, 0.25);
  CHECK(l2_norm(f) == doctest::Approx(2.0 * kTwoPi));
  CHECK(l2_norm(f, &w) == doctest::Approx(kTwoPi));
  w[3] = -1.0;
  CHECK_THROWS_AS(l2_norm(f, &w), FieldError);
}

TEST_CASE("non-finite input is rejected") {
  const Grid g = periodic2(8);
  ScalarField f(g);
  f[5] = std::nan("");
  CHECK_THROWS_AS(discrete_gradient(f), FieldError);
}

TEST_CASE("director helpers") {
  const Grid g = box2(8);
  DirectorField d(g, {0, 0, 1});
  CHECK(d.max_unit_violation() == 0.0);
  d.set(4, {0, 0, 1.1});
  CHECK(d.max_unit_violation() == doctest::Approx(0.1));
  d.normalize();
  CHECK(d.max_unit_violation() < 1e-15);
  const ScalarField c = d.component_field(2);
  CHECK(c.closure().kind == Closure::Kind::Fixed);
  CHECK(c.closure().value == 1.0);
}

TEST_CASE("snapshot round trip is bitwise") {
  std::mt19937_64 rng(4);
  for (const Grid& g : {periodic2(8), Grid::uniform(3, 5, 1.0, Boundary::DirichletBox)}) {
    FlowState s(g, {0, 0, 1});
    s.t = 0.125;
    s.step = 17;
    random_fill(s.rho.values(), rng, 0.1, 2.0);
    random_fill(s.p.values(), rng);
    for (int c = 0; c < g.dim(); ++c) random_fill(s.u.component(c), rng);
    for (int k = 0; k < 3; ++k) random_fill(s.d.component(k), rng);
    std::stringstream buf;
    write_snapshot(buf, s);
    std::string header;
    std::getline(buf, header);
    CHECK(header.find("\"dim\"") != std::string::npos);
    buf.seekg(0);
    const FlowState back = read_snapshot(buf);
    CHECK(back == s);
  }
}
