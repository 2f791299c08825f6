#pragma once

#include "covsel/model.hpp"

namespace covsel {

/// Derived constants of the smoothed first-order method.
struct SmoothingParams {
  double epsilon = 0;
  double mu = 0;         // Huber width; 0 in the rho == 0 fallback
  double d1_max = 0;     // n log(beta/alpha)
  double d2_max = 0;     // n^2 / 2
  double sigma1 = 0;     // 1 / beta^2
  double sigma2 = 1;
  double lipschitz_m = 0;  // 1 / alpha^2
  double op_norm_a = 0;    // rho
  double lipschitz_l = 0;  // M + 1/mu (M when rho == 0)
};

SmoothingParams make_params(double alpha, double beta, double rho,
                            Eigen::Index n, double epsilon);

/// Huber smoothing of rho*|x| with width mu.
double psi(double x, double mu, double rho);

/// Componentwise clamp(x/mu, -rho, rho); the derivative of psi.
Eigen::MatrixXd u_star(const Eigen::MatrixXd& x, double mu, double rho);

struct FEps {
  double value;
  Eigen::MatrixXd grad;
};

/// Smoothed objective value and gradient -x^-1 + sigma + u_star(x).
FEps f_eps_and_grad(const SymMatrix& x, const SymMatrix& sigma,
                    const SmoothingParams& params);

/// A-priori iteration count of the method (general expression).
long iteration_bound(const SmoothingParams& params);

Solution solve_smooth(const ProblemInstance& problem, const SolverConfig& config,
                      const TraceCallback& trace = {});

}  // namespace covsel
