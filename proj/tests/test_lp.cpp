#include <doctest.h>

#include <random>

#include "support/oracles.hpp"

using namespace lcx;

TEST_SUITE("lp") {

TEST_CASE("textbook problem") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
  LinearProgram<double> lp;
  lp.A = (Eigen::MatrixXd(3, 2) << 1, 0, 0, 2, 3, 2).finished();
  lp.b = (VectorXd(3) << 4, 12, 18).finished();
  lp.c = (VectorXd(2) << 3, 5).finished();
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(36));
  CHECK(s.x(0) == doctest::Approx(2));
  CHECK(s.x(1) == doctest::Approx(6));
}

TEST_CASE("negative right-hand side needs phase one") {
  // x + y >= 2 written as -x - y <= -2; x <= 3, y <= 1; max -x
  LinearProgram<double> lp;
  lp.A = (Eigen::MatrixXd(3, 2) << -1, -1, 1, 0, 0, 1).finished();
  lp.b = (VectorXd(3) << -2, 3, 1).finished();
  lp.c = (VectorXd(2) << -1, 0).finished();
  const auto s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(-1));
}

TEST_CASE("infeasible and unbounded") {
  LinearProgram<double> lp;
  lp.A = (Eigen::MatrixXd(2, 1) << 1, -1).finished();
  lp.b = (VectorXd(2) << 1, -2).finished();
  lp.c = (VectorXd(1) << 1).finished();
  CHECK(solve_lp(lp).status == LpStatus::infeasible);

  lp.A = (Eigen::MatrixXd(1, 2) << 1, -1).finished();
  lp.b = (VectorXd(1) << 1).finished();
  lp.c = (VectorXd(2) << 0, 1).finished();
  CHECK(solve_lp(lp).status == LpStatus::unbounded);

  lp.c = (VectorXd(3) << 0, 1, 1).finished();
  CHECK_THROWS_AS(solve_lp(lp), Error);
}

TEST_CASE("degenerate problem terminates") {
  // Beale's cycling example for the textbook rule
  LinearProgram<double> lp;
  lp.A = (Eigen::MatrixXd(3, 4) << 0.25, -8, -1, 9, 0.5, -12, -0.5, 3, 0, 0, 1, 0).finished();
  lp.b = (VectorXd(3) << 0, 0, 1).finished();
  lp.c = (VectorXd(4) << 0.75, -20, 0.5, -6).finished();
  SimplexOptions opts;
  opts.stall_limit = 1;
  const auto s = solve_lp(lp, opts);
  REQUIRE(s.status == LpStatus::optimal);
  CHECK(s.objective == doctest::Approx(1.25));
  CHECK(s.objective == doctest::Approx(oracle::lp_by_vertices(lp.A, lp.b, lp.c)));
}

TEST_CASE("random bounded problems match vertex enumeration") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1), pos(0.1, 2);
  for (int t = 0; t < 200; ++t) {
    const Index n = 2 + t % 2, m = 3 + t % 3;
    LinearProgram<double> lp;
    lp.A = Eigen::MatrixXd(m + 1, n);
    lp.b = VectorXd(m + 1);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < n; ++j) lp.A(i, j) = u(rng);
      lp.b(i) = u(rng) + 0.5;
    }
    lp.A.row(m).setOnes();  // keeps the feasible set bounded
    lp.b(m) = pos(rng) * 3;
    lp.c = VectorXd(n);
    for (Index j = 0; j < n; ++j) lp.c(j) = u(rng);
    const auto s = solve_lp(lp);
    const double want = oracle::lp_by_vertices(lp.A, lp.b, lp.c);
    if (std::isinf(want)) {
      CHECK(s.status == LpStatus::infeasible);
      continue;
    }
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.objective == doctest::Approx(want).epsilon(1e-9));
    CHECK(((lp.A * s.x - lp.b).array() <= 1e-9).all());
    CHECK((s.x.array() >= -1e-12).all());
  }
}

}
