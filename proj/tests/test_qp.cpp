#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "hocbf/qp.hpp"
#include "qp_oracle.hpp"

using namespace hocbf;



TEST_CASE("projection onto a single halfspace") {
  QPProblem p;
  p.hessian = Eigen::MatrixXd::Identity(3, 3);
  p.linear = Eigen::VectorXd::Zero(3);
  p.add_row(Eigen::RowVector3d(1, 0, 0), -1.0);  // z1 - 1 >= 0
  QPSolution s = solve(p);
  REQUIRE(s.status == QPStatus::optimal);
  CHECK(s.z[0] == doctest::Approx(1.0));
  CHECK(s.z[1] == doctest::Approx(0.0));
  CHECK(s.z[2] == doctest::Approx(0.0));
  REQUIRE(s.active.size() == 1);
  CHECK(s.active[0] == 0);
}

TEST_CASE("symmetric projection onto a diagonal halfspace") {
  QPProblem p;
  p.hessian = Eigen::MatrixXd::Identity(2, 2);
  p.linear = Eigen::VectorXd::Zero(2);
  p.add_row(Eigen::RowVector2d(1, 1), -2.0);  // z1 + z2 >= 2
  QPSolution s = solve(p);
  REQUIRE(s.status == QPStatus::optimal);
  CHECK(s.z[0] == doctest::Approx(1.0));
  CHECK(s.z[1] == doctest::Approx(1.0));
}

TEST_CASE("box bounds clamp the unconstrained minimizer") {
  QPProblem p;
  p.hessian = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  p.linear = Eigen::Vector2d(-10.0, 1.0);  // pulls z1 to 5, z2 to -0.5
  p.lower = Eigen::Vector2d(-1.0, -0.2);
  p.upper = Eigen::Vector2d(1.0, 0.2);
  QPSolution s = solve(p);
  REQUIRE(s.status == QPStatus::optimal);
  CHECK(s.z[0] == doctest::Approx(1.0));
  CHECK(s.z[1] == doctest::Approx(-0.2));
}

TEST_CASE("plainly contradictory rows are reported infeasible") {
  QPProblem p;
  p.hessian = Eigen::MatrixXd::Identity(1, 1);
  p.linear = Eigen::VectorXd::Zero(1);
  p.add_row(Eigen::RowVectorXd::Constant(1, 1.0), -1.0);  // z >= 1
  p.add_row(Eigen::RowVectorXd::Constant(1, -1.0), 0.0);  // z <= 0
  QPSolution s = solve(p);
  REQUIRE(s.status == QPStatus::infeasible);
  CHECK(s.infeasible_rows.size() >= 1);
  CHECK(s.z.allFinite());
}

TEST_CASE("near-singular hessian is regularized and solved") {
  QPProblem p;
  p.hessian = Eigen::MatrixXd::Zero(2, 2);
  p.hessian(0, 0) = 1.0;  // singular in z2
  p.linear = Eigen::Vector2d(-1.0, 0.0);
  p.lower = Eigen::Vector2d(-2.0, -2.0);
  p.upper = Eigen::Vector2d(2.0, 2.0);
  QPSolution s = solve(p);
  REQUIRE(s.status == QPStatus::optimal);
  CHECK(s.regularized);
  CHECK(s.z[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("scaling the cost leaves the minimizer unchanged") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    QPProblem p = qp_oracle::random_problem(rng, false);
    QPSolution s1 = solve(p);
    QPProblem q = p;
    q.hessian *= 37.5;
    q.linear *= 37.5;
    QPSolution s2 = solve(q);
    REQUIRE(s1.status == s2.status);
    if (s1.status == QPStatus::optimal)
      CHECK((s1.z - s2.z).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("active-set solve matches exhaustive enumeration") {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int optimal_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 600; ++trial) {
    QPProblem p = qp_oracle::random_problem(rng, unit(rng) < 0.25);
    qp_oracle::Result oracle = qp_oracle::enumerate_qp(p.hessian, p.linear, p.row_coeff,
                                       p.row_offset, p.lower, p.upper);
    QPSolution s = solve(p);
    REQUIRE(s.status != QPStatus::degenerate);
    if (oracle.feasible) {
      ++optimal_seen;
      REQUIRE(s.status == QPStatus::optimal);
      CHECK(s.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
      // KKT certificates on every optimal solve
      CHECK(s.stationarity <= 1e-7);
      CHECK(s.feasibility <= 1e-8);
      CHECK(s.complementarity <= 1e-7);
    } else {
      ++infeasible_seen;
      REQUIRE(s.status == QPStatus::infeasible);
    }
  }
  CHECK(optimal_seen >= 300);
  CHECK(infeasible_seen >= 80);
}
