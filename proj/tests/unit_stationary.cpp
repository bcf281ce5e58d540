#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "core/config.hpp"
#include "core/experiments.hpp"
#include "core/grid.hpp"
#include "core/model.hpp"
#include "core/pde.hpp"
#include "core/stationary.hpp"
#include "doctest.h"

using namespace fhn;

namespace {

Grid2D grid64() {
  Grid2D g;
  g.nx = 64;
  g.nv = 64;
  return g;
}

ModelParams weakly_coupled() {
  ModelParams p;
  p.eps = 0.2;
  return p;
}

} // namespace

TEST_CASE("generator columns sum to zero exactly") {
  Grid2D g;
  g.nx = 24;
  g.nv = 20;
  ModelParams p;
  p.eps = 0.3;
  const auto Q = generator_matrix(g, p, 0.17);
  REQUIRE(Q.cols() == static_cast<long>(g.size()));
  for (int c = 0; c < Q.outerSize(); ++c) {
    double colsum = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(Q, c); it; ++it)
      colsum += it.value();
    CHECK(std::fabs(colsum) <= 1e-15);
  }
}

TEST_CASE("the frozen-coupling steady state is also a time-stepper fixed point") {
  const Grid2D g = grid64();
  const ModelParams p = weakly_coupled();
  const StationaryConfig cfg;
  const double j = 0.12;
  Density G = solve_linear_stationary(g, p, j, cfg);

  CHECK(std::fabs(mass(G) - 1.0) <= 1e-12);
  CHECK(min_value(G) >= 0.0);
  const auto Q = generator_matrix(g, p, j);
  CHECK(generator_residual_l1(Q, G) <= cfg.residual_tol);

  // the transport-diffusion splitting shares its steady states with Q
  Density stepped = G;
  step(stepped, 5e-4, p, j);
  CHECK(l1_distance(stepped, G) <= 1e-10);
}

TEST_CASE("without coupling the steady state ignores the frozen j") {
  const Grid2D g = grid64();
  ModelParams p; // eps = 0
  const StationaryConfig cfg;
  const Density a = solve_linear_stationary(g, p, 0.3, cfg);
  const Density b = solve_linear_stationary(g, p, -0.5, cfg);
  CHECK(l1_distance(a, b) <= 1e-8);
}

TEST_CASE("self-consistent search finds the single weakly-coupled state") {
  const auto sols = find_stationary(grid64(), weakly_coupled(), {});
  REQUIRE(sols.size() == 1);
  const auto& s = sols[0];
  CHECK(s.converged);
  CHECK(s.j == doctest::Approx(0.128737687).epsilon(1e-6));
  CHECK(s.residual_l1 <= 1e-8);
  CHECK(s.fixed_point_gap <= 1e-8);
  CHECK(std::fabs(mass(s.G) - 1.0) <= 1e-12);
  REQUIRE(!s.j_history.empty());
  CHECK(s.j_history.front() == s.seed_j);
  CHECK(s.iterations >= 1);
}

TEST_CASE("well-spread seeds collapse to one deduplicated state") {
  StationaryConfig cfg;
  cfg.j_seeds = {-1.0, 0.0, 1.0};
  const auto sols = find_stationary(grid64(), weakly_coupled(), cfg);
  REQUIRE(sols.size() == 1);
  CHECK(sols[0].j == doctest::Approx(0.128737687).epsilon(1e-6));
}

TEST_CASE("strong gap-junction coupling sustains two distinct states") {
  ModelParams p;
  p.lambda = 2.5;
  p.i0 = -0.9;
  p.coupling_orientation = -1;
  p.eps = 3.0;
  StationaryConfig cfg;
  cfg.j_seeds = {0.4, 1.9};
  const auto sols = find_stationary(grid64(), p, cfg);
  REQUIRE(sols.size() == 2);
  double lo = sols[0].j, hi = sols[1].j;
  if (lo > hi) std::swap(lo, hi);
  CHECK(lo == doctest::Approx(0.487049650).epsilon(1e-6));
  CHECK(hi == doctest::Approx(1.827951075).epsilon(1e-6));
  for (const auto& s : sols) {
    CHECK(s.converged);
    CHECK(s.residual_l1 <= 1e-8);
  }
}

TEST_CASE("the distance to the uncoupled state shrinks linearly in strength") {
  const EpsProximityScan scan = epsilon_proximity_scan(
      grid64(), ModelParams{}, {0.2, 0.1, 0.0}, WeightParams{}, {});
  REQUIRE(scan.rows.size() == 3);
  CHECK(scan.rows[0].eps == 0.2);
  CHECK(scan.rows[0].distance == doctest::Approx(0.161643665).epsilon(1e-5));
  CHECK(scan.rows[0].j == doctest::Approx(0.128737687).epsilon(1e-6));
  CHECK(scan.rows[1].distance == doctest::Approx(0.078207563).epsilon(1e-5));
  CHECK(scan.rows[1].j == doctest::Approx(0.121454459).epsilon(1e-6));
  CHECK(scan.rows[2].distance == 0.0);
  CHECK(scan.rows[2].j == doctest::Approx(0.114564614).epsilon(1e-6));
  CHECK(scan.monotone);
  CHECK(scan.slope == doctest::Approx(0.808218).epsilon(1e-3));
  // the fitted line passes near the origin: no residual offset at eps = 0
  CHECK(std::fabs(scan.intercept) <= 0.05 * scan.rows[0].distance);
}

TEST_CASE("interior positivity audit reports the offending cell") {
  const Grid2D g = grid64();
  const ModelParams p = weakly_coupled();
  Density G = solve_linear_stationary(g, p, 0.128737687, {});
  const PositivityReport ok = positivity_check(G);
  CHECK(ok.pass);
  CHECK(ok.min_value > 0.0);

  G.at(10, 12) = 0.0;
  const PositivityReport bad = positivity_check(G);
  CHECK(!bad.pass);
  CHECK(bad.min_value == 0.0);
  CHECK(bad.i == 10);
  CHECK(bad.k == 12);
  CHECK(bad.x == doctest::Approx(g.x_center(10)));
  CHECK(bad.v == doctest::Approx(g.v_center(12)));
}

TEST_CASE("algebraic and long-time routes land on the same state") {
  const TwoRouteCheck chk =
      stationary_two_routes(grid64(), weakly_coupled(), 0.128737687, {});
  CHECK(chk.l1_between <= 1e-8);
  CHECK(chk.residual_algebraic <= 1e-9);
  CHECK(chk.longtime_t > 0.0);
  CHECK(std::fabs(mass(chk.algebraic) - 1.0) <= 1e-12);
  CHECK(std::fabs(mass(chk.longtime) - 1.0) <= 1e-10);
}
