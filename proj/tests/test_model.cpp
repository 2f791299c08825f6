#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "covsel/model.hpp"
#include "covsel/spectral.hpp"
#include "test_util.hpp"

using covsel::SymMatrix;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

SymMatrix diag2(double a, double b) {
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return SymMatrix(m);
}

SymMatrix scalar(double v) {
  MatrixXd m(1, 1);
  m(0, 0) = v;
  return SymMatrix(m);
}

}  // namespace

TEST_CASE("SymMatrix symmetrizes and validates") {
  MatrixXd m(2, 2);
  m << 1.0, 0.5 + 1e-9, 0.5, 2.0;
  SymMatrix s(m);
  CHECK(s(0, 1) == s(1, 0));
  CHECK(s(0, 1) == doctest::Approx(0.5 + 5e-10).epsilon(1e-12));

  MatrixXd bad(2, 2);
  bad << 1.0, 0.6, 0.5, 2.0;
  CHECK_THROWS_AS(SymMatrix{bad}, covsel::InvalidInput);

  MatrixXd inf_m(1, 1);
  inf_m(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(SymMatrix{inf_m}, covsel::InvalidInput);

  CHECK_THROWS_AS(SymMatrix{MatrixXd::Zero(2, 3)}, covsel::InvalidInput);
}

TEST_CASE("primal_objective examples") {
  CHECK(covsel::primal_objective(SymMatrix::Identity(2), SymMatrix::Identity(2), 0.0) ==
        doctest::Approx(-2.0).epsilon(1e-12));

  CHECK(covsel::primal_objective(diag2(0.5, 0.25), diag2(2, 4), 0.0) ==
        doctest::Approx(std::log(0.125) - 2.0).epsilon(1e-12));

  CHECK(covsel::primal_objective(diag2(2, 1), SymMatrix::Identity(2), 0.1) ==
        doctest::Approx(std::log(2.0) - 3.0 - 0.3).epsilon(1e-12));

  MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1;
  CHECK_THROWS_AS(covsel::primal_objective(SymMatrix(indef), SymMatrix::Identity(2), 0.0),
                  covsel::NotPositiveDefinite);
}

TEST_CASE("auto_bounds examples and singular branch") {
  auto b1 = covsel::auto_bounds(SymMatrix::Identity(2), 0.5);
  CHECK(b1.alpha == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(b1.beta == doctest::Approx(2.0).epsilon(1e-14));

  auto b2 = covsel::auto_bounds(SymMatrix::Identity(2), 4.0);
  CHECK(b2.alpha == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
  CHECK(b2.beta == doctest::Approx(0.5).epsilon(1e-14));

  auto b3 = covsel::auto_bounds(diag2(1, 0), 1.0);
  CHECK(b3.alpha == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(b3.beta == doctest::Approx(2.0).epsilon(1e-14));

  CHECK_THROWS_AS(covsel::auto_bounds(SymMatrix::Identity(2), 0.0),
                  covsel::InvalidPenalty);

  // degenerate zero matrix at n = 1 still returns an open interval
  auto b4 = covsel::auto_bounds(scalar(0.0), 1.0);
  CHECK(b4.alpha < b4.beta);
}

TEST_CASE("gap_block examples") {
  CHECK(covsel::gap_block(diag2(0.5, 0.25), diag2(2, 4), 0.0) ==
        doctest::Approx(0.0).epsilon(1e-14));
  CHECK(covsel::gap_block(SymMatrix::Identity(2), SymMatrix::Identity(2), 0.5) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(covsel::gap_block(SymMatrix::Identity(3), SymMatrix::Identity(3), 0.0) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("gap_smooth scalar examples") {
  CHECK(covsel::gap_smooth(scalar(1), scalar(0), scalar(1), 0.0, 0.1, 10.0) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // phi = min over [0.1, 10] of (1.5 lam - log lam) = 1 + log 1.5
  const double expected = 1.5 - (1.0 + std::log(1.5));
  CHECK(covsel::gap_smooth(scalar(1), scalar(0.5), scalar(1), 0.5, 0.1, 10.0) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("gap_smooth rejects infeasible iterates") {
  CHECK_THROWS_AS(covsel::gap_smooth(scalar(20), scalar(0), scalar(1), 0.0, 0.1, 10.0),
                  covsel::InfeasibleIterate);
  CHECK_THROWS_AS(covsel::gap_smooth(scalar(1), scalar(0.7), scalar(1), 0.5, 0.1, 10.0),
                  covsel::InfeasibleIterate);
}

TEST_CASE("weak duality on random feasible pairs") {
  std::mt19937_64 eng(7);
  const double alpha = 0.2, beta = 5.0, rho = 0.4;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(eng() % 4);
    SymMatrix y(testutil::random_box_feasible(eng, n, alpha, beta));
    MatrixXd u(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        u(i, j) = u(j, i) = testutil::urand(eng, -rho, rho);
      }
    }
    SymMatrix sigma = testutil::random_pd(eng, n, 0.5, 2.0);
    const double gap = covsel::gap_smooth(y, SymMatrix(u), sigma, rho, alpha, beta);
    const double primal = covsel::primal_objective(y, sigma, rho);
    CHECK(gap >= -1e-9 * (1.0 + std::abs(primal)));
  }
}

TEST_CASE("primal_objective is concave along feasible segments") {
  std::mt19937_64 eng(11);
  for (int t = 0; t < 40; ++t) {
    const int n = 3;
    SymMatrix sigma = testutil::random_pd(eng, n, 0.5, 2.0);
    MatrixXd x1 = testutil::random_box_feasible(eng, n, 0.3, 4.0);
    MatrixXd x2 = testutil::random_box_feasible(eng, n, 0.3, 4.0);
    const double tt = testutil::urand(eng, 0.0, 1.0);
    SymMatrix mid(tt * x1 + (1 - tt) * x2);
    const double lhs = covsel::primal_objective(mid, sigma, 0.3);
    const double rhs = tt * covsel::primal_objective(SymMatrix(x1), sigma, 0.3) +
                       (1 - tt) * covsel::primal_objective(SymMatrix(x2), sigma, 0.3);
    CHECK(lhs >= rhs - 1e-9);
  }
}

TEST_CASE("rho_information_criterion") {
  CHECK(covsel::rho_information_criterion(covsel::InfoCriterion::AIC, 100) ==
        doctest::Approx(0.02).epsilon(1e-14));
  CHECK(covsel::rho_information_criterion(covsel::InfoCriterion::BIC, 100) ==
        doctest::Approx(2.0 * std::log(50.0) / 100.0).epsilon(1e-14));
  CHECK(covsel::rho_information_criterion(covsel::InfoCriterion::AIC, 2) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(covsel::rho_information_criterion(covsel::InfoCriterion::BIC, 2),
                  covsel::InvalidSampleSize);
}

TEST_CASE("card") {
  CHECK(covsel::card(SymMatrix::Identity(3), 0.5) == 3);
  CHECK(covsel::card(SymMatrix::Zero(4), 0.0) == 0);
  MatrixXd m(2, 2);
  m << 1, 0.2, 0.2, 1;
  CHECK(covsel::card(SymMatrix(m), 0.1) == 4);
}

TEST_CASE("ProblemInstance validation") {
  covsel::ProblemInstance p;
  p.sigma = SymMatrix::Identity(3);
  p.rho = 0.5;
  CHECK_NOTHROW(p.validate());

  p.bounds = covsel::Bounds{1.0, 0.5};
  CHECK_THROWS_AS(p.validate(), covsel::InvalidInput);
  p.bounds.reset();

  // auto bounds require a positive penalty when materialized
  p.rho = 0.0;
  CHECK_THROWS_AS(p.effective_bounds(), covsel::InvalidPenalty);

  MatrixXd neg(2, 2);
  neg << 1, 0, 0, -1;
  covsel::ProblemInstance bad;
  bad.sigma = SymMatrix(neg);
  bad.rho = 0.1;
  CHECK_THROWS_AS(bad.validate(), covsel::InvalidInput);
}

TEST_CASE("SolverConfig validation") {
  covsel::SolverConfig c;
  c.epsilon = 1e-4;
  CHECK_NOTHROW(c.validate());
  CHECK(c.subqp_eps() == doctest::Approx(1e-6));
  c.subqp_epsilon = 1e-4;  // above epsilon / 10
  CHECK_THROWS_AS(c.validate(), covsel::InvalidInput);
  c.subqp_epsilon = 1e-6;
  CHECK_NOTHROW(c.validate());
}
