#include <doctest.h>

#include "nematic/dynamics.hpp"
#include "nematic/errors.hpp"
#include "nematic/poisson.hpp"
#include "support.hpp"

using namespace testing;

namespace {

void remove_mean(std::span<double> v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

} // namespace

TEST_CASE("spectral solve inverts the closure Laplacian") {
  std::mt19937_64 rng(30);
  for (const Grid& g : {periodic2(16), box2(12), Grid::uniform(3, 6, 1.0, Boundary::DirichletBox),
                        Grid(2, {8, 12, 1}, {1.0, 2.0, 1.0}, Boundary::Periodic)}) {
    ScalarField b(g);
    random_fill(b.values(), rng);
    remove_mean(b.values());
    SpectralLaplacian L(g);
    ScalarField x(g);
    L.solve(b.values(), x.values(), 2.0);
    const ScalarField back = discrete_laplacian(x);
    for (std::size_t n = 0; n < b.size(); ++n) CHECK(2.0 * back[n] == doctest::Approx(b[n]).epsilon(1e-9));
  }
}

TEST_CASE("variable-coefficient solve with both preconditioners") {
  std::mt19937_64 rng(31);
  for (const Grid& g : {periodic2(24), box2(24)}) {
    VectorField beta(g);
    for (int c = 0; c < 2; ++c) random_fill(beta.component(c), rng, 0.5, 20.0);
    ScalarField b(g);
    random_fill(b.values(), rng);
    remove_mean(b.values());
    ScalarField xs(g), xj(g);
    CgOptions opt;
    opt.rel_tol = 1e-12;
    opt.max_iter = 5000;
    VariablePoisson ps(g, Preconditioner::Spectral), pj(g, Preconditioner::Jacobi);
    REQUIRE(ps.solve(beta, b.values(), xs.values(), opt).converged);
    REQUIRE(pj.solve(beta, b.values(), xj.values(), opt).converged);
    ScalarField ax(g);
    ps.apply(beta, xs.values(), ax.values());
    for (std::size_t n = 0; n < b.size(); ++n) {
      CHECK(ax[n] == doctest::Approx(b[n]).epsilon(1e-8).scale(1.0));
      CHECK(xs[n] == doctest::Approx(xj[n]).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("inconsistent Neumann data is rejected") {
  const Grid g = box2(8);
  VectorField beta(g);
  for (double& v : beta.component(0)) v = 1.0;
  for (double& v : beta.component(1)) v = 1.0;
  ScalarField b(g, 1.0), x(g);
  VariablePoisson p(g, Preconditioner::Spectral);
  CHECK_THROWS_AS(p.solve(beta, b.values(), x.values(), {}), CompatibilityError);
}

TEST_CASE("projection is idempotent and meets the divergence contract") {
  std::mt19937_64 rng(32);
  for (const Grid& g : {periodic2(32), box2(32)}) {
    SolverConfig cfg;
    ScalarField rho(g);
    random_fill(rho.values(), rng, 0.2, 3.0);
    VectorField u(g);
    for (int c = 0; c < 2; ++c) random_fill(u.component(c), rng);
    u.zero_walls();
    Projector proj(g, cfg.preconditioner);
    const ProjectionResult a = proj.project(u, rho, cfg, 0.01);
    CHECK(a.max_divergence <= cfg.div_tol(g));
    const ProjectionResult b = proj.project(a.velocity, rho, cfg, 0.01);
    for (int c = 0; c < 2; ++c)
      for (std::size_t f = 0; f < u.component(c).size(); ++f)
        CHECK(b.velocity.component(c)[f] == doctest::Approx(a.velocity.component(c)[f]).epsilon(1e-8).scale(1.0));
    // The correction is rho-orthogonal to solenoidal fields.
    const VectorField w = random_solenoidal(g, rng);
    VectorField corr(g);
    const VectorField rf = average_to_faces(rho);
    for (int c = 0; c < 2; ++c)
      for (std::size_t f = 0; f < corr.component(c).size(); ++f)
        corr.component(c)[f] = rf.component(c)[f] * (u.component(c)[f] - a.velocity.component(c)[f]);
    CHECK(std::abs(inner(corr, w)) < 1e-8 * l2_norm(corr) * l2_norm(w) + 1e-12);
  }
}

TEST_CASE("vacuum without a floor is refused") {
  const Grid g = box2(8);
  ScalarField rho(g, 1.0);
  rho[10] = 0.0;
  rho[11] = 0.0;
  CHECK_THROWS_AS(effective_face_density(rho, 0.0), VacuumError);
  CHECK_NOTHROW(effective_face_density(rho, 1e-3));
}
