#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "covsel/boxqp.hpp"
#include "test_util.hpp"

using covsel::BoxQP;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

BoxQP random_instance(std::mt19937_64& eng, int m, double rho) {
  MatrixXd g = testutil::random_gaussian(eng, m, m);
  BoxQP p;
  p.q = g.transpose() * g / static_cast<double>(m);
  p.q = 0.5 * (p.q + p.q.transpose()).eval();
  p.b = testutil::random_gaussian(eng, m, 1);
  p.rho = rho;
  return p;
}

double objective(const BoxQP& p, const VectorXd& x) {
  return x.dot(p.q * x) + p.b.dot(x);
}

}  // namespace

TEST_CASE("project_box") {
  VectorXd v(2);
  v << 2.0, -0.3;
  VectorXd got = covsel::project_box(v, 1.0);
  CHECK(got[0] == doctest::Approx(1.0));
  CHECK(got[1] == doctest::Approx(-0.3));

  VectorXd inside(3);
  inside << 0.1, -0.2, 0.0;
  CHECK((covsel::project_box(inside, 0.5) - inside).cwiseAbs().maxCoeff() == 0.0);

  VectorXd one(1);
  one << -5.0;
  CHECK(covsel::project_box(one, 0.0)[0] == 0.0);
}

TEST_CASE("solve_boxqp separable example") {
  BoxQP p;
  p.q = MatrixXd::Identity(2, 2);
  p.b = VectorXd(2);
  p.b << -3.0, 0.1;
  p.rho = 1.0;
  auto res = covsel::solve_boxqp(p, 1e-13);
  CHECK(res.certified);
  CHECK(std::abs(res.x[0] - 1.0) <= 1e-6);
  CHECK(std::abs(res.x[1] + 0.05) <= 1e-6);
  CHECK(res.objective == doctest::Approx(-2.0025).epsilon(1e-9));
}

TEST_CASE("solve_boxqp trivial cases") {
  BoxQP p;
  p.q = MatrixXd::Identity(1, 1);
  p.b = VectorXd::Zero(1);
  p.rho = 1.0;
  auto res = covsel::solve_boxqp(p, 1e-10);
  CHECK(res.x[0] == doctest::Approx(0.0));
  CHECK(res.objective == doctest::Approx(0.0));

  p.rho = 0.0;
  p.b << 5.0;
  auto res0 = covsel::solve_boxqp(p, 1e-10);
  CHECK(res0.x[0] == 0.0);
  CHECK(res0.certified);

  BoxQP empty;
  empty.q = MatrixXd(0, 0);
  empty.b = VectorXd(0);
  empty.rho = 1.0;
  CHECK(covsel::solve_boxqp(empty, 1e-10).certified);
}

TEST_CASE("oracle_boxqp examples") {
  BoxQP p;
  p.q = MatrixXd::Identity(2, 2);
  p.b = VectorXd(2);
  p.b << -3.0, 0.1;
  p.rho = 1.0;
  auto res = covsel::oracle_boxqp(p);
  CHECK(res.x[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.x[1] == doctest::Approx(-0.05).epsilon(1e-12));

  p.rho = 0.0;
  auto res0 = covsel::oracle_boxqp(p);
  CHECK(res0.x.cwiseAbs().maxCoeff() == 0.0);
  CHECK(res0.objective == 0.0);

  BoxQP scalar;
  scalar.q = MatrixXd::Identity(1, 1);
  scalar.b = VectorXd(1);
  scalar.b << -4.0;
  scalar.rho = 1.0;
  CHECK(covsel::oracle_boxqp(scalar).x[0] == doctest::Approx(1.0));

  BoxQP big;
  big.q = MatrixXd::Identity(9, 9);
  big.b = VectorXd::Zero(9);
  big.rho = 1.0;
  CHECK_THROWS_AS(covsel::oracle_boxqp(big), covsel::OracleTooLarge);
}

TEST_CASE("kkt_residual") {
  BoxQP p;
  p.q = MatrixXd::Identity(2, 2);
  p.b = VectorXd(2);
  p.b << -3.0, 0.1;
  p.rho = 1.0;
  CHECK(covsel::kkt_residual(p, VectorXd::Zero(2)) == doctest::Approx(1.0));

  auto res = covsel::oracle_boxqp(p);
  CHECK(covsel::kkt_residual(p, res.x) <= 1e-9);

  // interior optimum
  BoxQP q;
  q.q = MatrixXd::Identity(2, 2);
  q.b = VectorXd(2);
  q.b << -0.2, 0.4;
  q.rho = 10.0;
  auto ri = covsel::oracle_boxqp(q);
  CHECK(covsel::kkt_residual(q, ri.x) <= 1e-9);
}

TEST_CASE("solver matches the enumeration oracle") {
  std::mt19937_64 eng(29);
  const double rhos[] = {0.1, 1.0, 10.0};
  for (int t = 0; t < 60; ++t) {
    const int m = 1 + static_cast<int>(eng() % 6);
    BoxQP p = random_instance(eng, m, rhos[t % 3]);
    auto oracle = covsel::oracle_boxqp(p);
    auto got = covsel::solve_boxqp(p, 1e-9);
    CHECK(got.certified);
    CHECK(std::abs(got.objective - oracle.objective) <=
          1e-6 * (1.0 + std::abs(oracle.objective)));
  }
}

TEST_CASE("best objective is monotone in the iteration budget") {
  std::mt19937_64 eng(31);
  BoxQP p = random_instance(eng, 5, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (long cap : {1L, 2L, 5L, 10L, 30L, 100L, 300L}) {
    auto res = covsel::solve_boxqp(p, 1e-14, std::nullopt, cap);
    CHECK(res.objective <= prev + 1e-15);
    prev = res.objective;
    CHECK(res.x.cwiseAbs().maxCoeff() <= p.rho);
  }
}

TEST_CASE("positive scaling of the objective keeps the minimizer") {
  std::mt19937_64 eng(37);
  for (int t = 0; t < 20; ++t) {
    const int m = 2 + static_cast<int>(eng() % 4);
    BoxQP p = random_instance(eng, m, 1.0);
    BoxQP scaled;
    const double c = 7.5;
    scaled.q = c * p.q;
    scaled.b = c * p.b;
    scaled.rho = p.rho;
    auto r1 = covsel::solve_boxqp(p, 1e-12);
    auto r2 = covsel::solve_boxqp(scaled, c * 1e-12);
    CHECK((r1.x - r2.x).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("warm start cannot be worse than its initial point") {
  std::mt19937_64 eng(41);
  for (int t = 0; t < 20; ++t) {
    BoxQP p = random_instance(eng, 4, 0.5);
    VectorXd x0 = covsel::project_box(testutil::random_gaussian(eng, 4, 1), p.rho);
    auto res = covsel::solve_boxqp(p, 1e-9, x0, 3);
    CHECK(res.objective <= objective(p, x0) + 1e-12);
  }
}

TEST_CASE("semidefinite q is accepted, indefinite rejected") {
  BoxQP psd;
  psd.q = MatrixXd::Zero(2, 2);
  psd.q(0, 0) = 1.0;  // rank one
  psd.b = VectorXd(2);
  psd.b << 1.0, -2.0;
  psd.rho = 1.0;
  auto res = covsel::solve_boxqp(psd, 1e-9);
  auto oracle = covsel::oracle_boxqp(psd);
  CHECK(std::abs(res.objective - oracle.objective) <= 1e-6 * (1 + std::abs(oracle.objective)));

  BoxQP indef;
  indef.q = MatrixXd::Zero(2, 2);
  indef.q(0, 0) = 1.0;
  indef.q(1, 1) = -1.0;
  indef.b = VectorXd::Zero(2);
  indef.rho = 1.0;
  CHECK_THROWS_AS(covsel::solve_boxqp(indef, 1e-9), covsel::InvalidInput);
}
