#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "covsel/types.hpp"

namespace testutil {

inline double urand(std::mt19937_64& eng, double lo, double hi) {
  const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

inline Eigen::MatrixXd random_gaussian(std::mt19937_64& eng, int rows, int cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = nd(eng);
  }
  return m;
}

inline Eigen::MatrixXd random_orthogonal(std::mt19937_64& eng, int n) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_gaussian(eng, n, n));
  return qr.householderQ();
}

/// PD matrix with eigenvalues log-uniform in [lmin, lmax].
inline covsel::SymMatrix random_pd(std::mt19937_64& eng, int n, double lmin,
                                   double lmax) {
  Eigen::MatrixXd q = random_orthogonal(eng, n);
  Eigen::VectorXd lam(n);
  for (int i = 0; i < n; ++i) {
    lam[i] = std::exp(urand(eng, std::log(lmin), std::log(lmax)));
  }
  lam[0] = lmin;  // pin the extremes so the condition number is exact
  if (n > 1) lam[n - 1] = lmax;
  Eigen::MatrixXd m = q * lam.asDiagonal() * q.transpose();
  return covsel::SymMatrix(0.5 * (m + m.transpose()));
}

inline Eigen::MatrixXd random_symmetric(std::mt19937_64& eng, int n, double scale) {
  Eigen::MatrixXd m = random_gaussian(eng, n, n) * scale;
  return 0.5 * (m + m.transpose());
}

/// Random point of the eigenvalue box {alpha I <= X <= beta I}.
inline Eigen::MatrixXd random_box_feasible(std::mt19937_64& eng, int n,
                                           double alpha, double beta) {
  Eigen::MatrixXd q = random_orthogonal(eng, n);
  Eigen::VectorXd lam(n);
  for (int i = 0; i < n; ++i) lam[i] = urand(eng, alpha, beta);
  Eigen::MatrixXd m = q * lam.asDiagonal() * q.transpose();
  return 0.5 * (m + m.transpose());
}

inline double rel_fro_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / b.norm();
}

/// log|det| by LU; supports the slightly asymmetric matrices used by the
/// finite-difference gradient oracle.
inline double logabsdet_lu(const Eigen::MatrixXd& m) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  double s = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += std::log(std::abs(lu.matrixLU()(i, i)));
  }
  return s;
}

}  // namespace testutil
