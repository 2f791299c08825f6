#pragma once

#include <optional>

#include "covsel/types.hpp"

namespace covsel {

/// minimize x^T q x + b^T x  subject to |x_i| <= rho.
struct BoxQP {
  Eigen::MatrixXd q;  // symmetric positive semidefinite
  Eigen::VectorXd b;
  double rho = 0;
};

struct BoxQPResult {
  Eigen::VectorXd x;
  double objective = 0;
  bool certified = false;
  long iterations = 0;
  double kkt = 0;
};

Eigen::VectorXd project_box(const Eigen::VectorXd& x, double rho);

/// Accelerated projected gradient from x0 (default 0), terminated when the
/// fixed-point residual certifies the requested objective accuracy. Returns
/// the best iterate seen; certified=false when the iteration cap is hit.
BoxQPResult solve_boxqp(const BoxQP& p, double epsilon,
                        const std::optional<Eigen::VectorXd>& x0 = std::nullopt,
                        long max_iterations = 200000);

/// Exact minimizer by 3^m active-set enumeration (test oracle, m <= 8).
BoxQPResult oracle_boxqp(const BoxQP& p);

/// ||x - project_box(x - (2 q x + b), rho)||_inf; zero iff x is optimal.
double kkt_residual(const BoxQP& p, const Eigen::VectorXd& x);

namespace detail {
/// lmax/lmin estimates of a symmetric PSD matrix: exact for small sizes,
/// power iteration above that.
void extreme_eigs(const Eigen::MatrixXd& q, double& lmax, double& lmin);
}  // namespace detail

}  // namespace covsel
