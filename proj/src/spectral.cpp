#include "covsel/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace covsel {

namespace detail {

EigenPair sym_eig(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success) {
    throw EigenFailure("symmetric eigendecomposition failed to converge");
  }
  return EigenPair{es.eigenvectors(), es.eigenvalues()};
}

Eigen::MatrixXd project_box_spectrum(const Eigen::MatrixXd& g, double alpha, double beta) {
  EigenPair ep = sym_eig(g);
  Eigen::VectorXd lam = ep.values.cwiseMax(alpha).cwiseMin(beta);
  Eigen::MatrixXd r = ep.vectors * lam.asDiagonal() * ep.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

static double entropic_lambda(double sigma, double alpha, double beta) {
  if (sigma <= 0.0) return beta;
  return std::clamp(1.0 / sigma, alpha, beta);
}

Eigen::MatrixXd entropic_min(const Eigen::MatrixXd& s, double alpha, double beta) {
  EigenPair ep = sym_eig(s);
  Eigen::VectorXd lam(ep.values.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    lam[i] = entropic_lambda(ep.values[i], alpha, beta);
  }
  Eigen::MatrixXd r = ep.vectors * lam.asDiagonal() * ep.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

double phi_shifted(const Eigen::MatrixXd& sigma_plus_u, double alpha, double beta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma_plus_u, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw EigenFailure("symmetric eigendecomposition failed to converge");
  }
  const Eigen::VectorXd& sig = es.eigenvalues();
  double total = 0.0;
  for (Eigen::Index i = 0; i < sig.size(); ++i) {
    const double lam = entropic_lambda(sig[i], alpha, beta);
    total += sig[i] * lam - std::log(lam);
  }
  return total;
}

double spectral_norm(const Eigen::MatrixXd& s) {
  if (s.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw EigenFailure("symmetric eigendecomposition failed to converge");
  }
  return std::max(std::abs(es.eigenvalues()[0]),
                  std::abs(es.eigenvalues()[s.rows() - 1]));
}

}  // namespace detail

EigenPair sym_eig(const SymMatrix& s) { return detail::sym_eig(s.mat()); }

SymMatrix project_box_spectrum(const SymMatrix& g, double alpha, double beta) {
  if (!(alpha < beta)) throw InvalidInput("require alpha < beta");
  return SymMatrix(detail::project_box_spectrum(g.mat(), alpha, beta));
}

SymMatrix entropic_min(const SymMatrix& s, double alpha, double beta) {
  if (!(alpha < beta) || !(alpha > 0)) {
    throw InvalidInput("require 0 < alpha < beta");
  }
  return SymMatrix(detail::entropic_min(s.mat(), alpha, beta));
}

double phi(const SymMatrix& u, const SymMatrix& sigma, double alpha, double beta) {
  if (!(alpha < beta) || !(alpha > 0)) {
    throw InvalidInput("require 0 < alpha < beta");
  }
  if (u.n() != sigma.n()) throw InvalidInput("dimension mismatch");
  return detail::phi_shifted(sigma.mat() + u.mat(), alpha, beta);
}

}  // namespace covsel
