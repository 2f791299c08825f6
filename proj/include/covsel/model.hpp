#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "covsel/types.hpp"

namespace covsel {

enum class SolverKind { Smooth, BlockDescent, BlockAscent };
enum class InfoCriterion { AIC, BIC };

struct Bounds {
  double alpha = 0;
  double beta = 0;
};

/// A covariance-selection instance: sample covariance, l1 penalty level and
/// eigenvalue-bound policy (explicit or derived from (sigma, rho)).
struct ProblemInstance {
  SymMatrix sigma;
  double rho = 0;
  std::optional<Bounds> bounds;  // nullopt: automatic bounds, needs rho > 0

  void validate() const;
  Bounds effective_bounds() const;
};

struct SolverConfig {
  double epsilon = 1e-4;       // target duality gap
  long max_iterations = 20000; // iterations (smooth) or sweeps (coordinate)
  SolverKind solver = SolverKind::BlockDescent;
  double subqp_epsilon = 0;    // 0: epsilon / 100
  long refactor_every = 5;     // sweeps between full re-inversions
  std::uint64_t seed = 0;      // reserved for randomized column rules
  long gap_check_every = 1;    // smooth solver: certificate cadence

  double subqp_eps() const {
    return subqp_epsilon > 0 ? subqp_epsilon : epsilon / 100.0;
  }
  void validate() const;
};

struct Solution {
  SymMatrix x;
  SymMatrix u;
  double primal_objective = 0;
  double dual_objective = 0;
  double gap = 0;
  long iterations = 0;
  bool converged = false;
  double wall_time_seconds = 0;
};

struct TracePoint {
  long k;
  double primal;
  double dual;
  double gap;
  double elapsed_seconds;
};
using TraceCallback = std::function<void(const TracePoint&)>;

/// log det x - <sigma, x> - rho * sum|x_ij|. Throws NotPositiveDefinite.
double primal_objective(const SymMatrix& x, const SymMatrix& sigma, double rho);

/// alpha(n) = 1/(||sigma||_2 + n rho), beta(n) = n min(1/rho, ||sigma^-1||_2),
/// with the inverse-norm branch treated as +inf for singular sigma.
Bounds auto_bounds(const SymMatrix& sigma, double rho);

/// <sigma, x> - n + rho * sum|x_ij|; the block solvers' duality gap when
/// x = (sigma + u)^-1 for a dual-feasible u.
double gap_block(const SymMatrix& x, const SymMatrix& sigma, double rho);

/// (-log det y + <sigma, y> + rho sum|y_ij|) - phi(u_hat). Requires y
/// feasible for the eigenvalue box and u_hat inside the dual box.
double gap_smooth(const SymMatrix& y, const SymMatrix& u_hat,
                  const SymMatrix& sigma, double rho, double alpha, double beta);

/// AIC: 2/N.  BIC: 2 log(N/2)/N, needs N >= 3.
double rho_information_criterion(InfoCriterion criterion, long sample_size);

/// Number of entries with |x_ij| > threshold, diagonal included.
long card(const SymMatrix& x, double threshold);

namespace detail {

double l1_all(const Eigen::MatrixXd& m);
double trace_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
double logdet_pd(const Eigen::MatrixXd& m);  // throws NotPositiveDefinite

/// -log det x + <sigma, x> + rho * sum|x_ij| (the minimization objective).
double primal_min_part(const Eigen::MatrixXd& x, const Eigen::MatrixXd& sigma, double rho);

/// -log det(sigma + u) - n (the block dual objective, min convention).
double block_dual_objective(const Eigen::MatrixXd& u, const Eigen::MatrixXd& sigma);

/// Final primal/dual/gap consistent across solvers and report recomputation.
/// Smooth: dual = -phi(u). Descent: dual = -logdet(sigma+u) - n. Ascent:
/// descent formula when x is a consistent inverse of sigma+u, otherwise -phi.
struct GapComponents {
  double primal;
  double dual;
  double gap;
};
GapComponents solution_gap(SolverKind kind, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& u, const Eigen::MatrixXd& sigma,
                           double rho, double alpha, double beta);

bool inverse_consistent(const Eigen::MatrixXd& x, const Eigen::MatrixXd& s);

}  // namespace detail

}  // namespace covsel
