#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <utility>

namespace covsel {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : Error {
  NotPositiveDefinite() : Error("matrix is not positive definite") {}
  explicit NotPositiveDefinite(const std::string& what) : Error(what) {}
};

struct InvalidPenalty : Error {
  InvalidPenalty() : Error("automatic eigenvalue bounds require rho > 0") {}
  explicit InvalidPenalty(const std::string& what) : Error(what) {}
};

struct InvalidSampleSize : Error {
  explicit InvalidSampleSize(const std::string& what) : Error(what) {}
};

struct InfeasibleIterate : Error {
  explicit InfeasibleIterate(const std::string& what) : Error(what) {}
};

struct InvalidInput : Error {
  explicit InvalidInput(const std::string& what) : Error(what) {}
};

struct OracleTooLarge : Error {
  explicit OracleTooLarge(const std::string& what) : Error(what) {}
};

struct EigenFailure : Error {
  explicit EigenFailure(const std::string& what) : Error(what) {}
};

/// Dense real symmetric matrix, the container for covariances, precision
/// estimates and dual certificates. The constructor symmetrizes its input
/// as (S + S^T)/2 and rejects matrices whose asymmetry exceeds
/// 1e-6 * max|S|, so downstream eigensolvers always see exact symmetry.
class SymMatrix {
 public:
  SymMatrix() : m_(0, 0) {}
  explicit SymMatrix(Eigen::MatrixXd m);

  static SymMatrix Identity(Eigen::Index n) {
    return SymMatrix(Eigen::MatrixXd::Identity(n, n));
  }
  static SymMatrix Zero(Eigen::Index n) {
    return SymMatrix(Eigen::MatrixXd::Zero(n, n));
  }

  Eigen::Index n() const { return m_.rows(); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
};

}  // namespace covsel
