#pragma once

#include "covsel/types.hpp"

namespace covsel {

/// Eigendecomposition of a symmetric matrix: orthonormal eigenvectors in
/// columns, eigenvalues ascending.
struct EigenPair {
  Eigen::MatrixXd vectors;
  Eigen::VectorXd values;
};

EigenPair sym_eig(const SymMatrix& s);

/// Frobenius projection onto {alpha*I <= X <= beta*I}: eigenvalues of g
/// clamped to [alpha, beta].
SymMatrix project_box_spectrum(const SymMatrix& g, double alpha, double beta);

/// argmin over {alpha*I <= X <= beta*I} of <s, X> - log det X.
/// Spectral solution: lambda_i = clamp(1/sigma_i, alpha, beta) for
/// sigma_i > 0, and lambda_i = beta when sigma_i <= 0 (the scalar objective
/// sigma*lambda - log(lambda) is decreasing there).
SymMatrix entropic_min(const SymMatrix& s, double alpha, double beta);

/// Dual function value: min over {alpha*I <= X <= beta*I} of
/// -log det X + <sigma + u, X>.
double phi(const SymMatrix& u, const SymMatrix& sigma, double alpha, double beta);

namespace detail {

EigenPair sym_eig(const Eigen::MatrixXd& s);
Eigen::MatrixXd project_box_spectrum(const Eigen::MatrixXd& g, double alpha, double beta);
Eigen::MatrixXd entropic_min(const Eigen::MatrixXd& s, double alpha, double beta);

/// phi evaluated on a pre-assembled sigma + u.
double phi_shifted(const Eigen::MatrixXd& sigma_plus_u, double alpha, double beta);

/// Largest absolute eigenvalue.
double spectral_norm(const Eigen::MatrixXd& s);

}  // namespace detail

}  // namespace covsel
