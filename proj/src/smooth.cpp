#include "covsel/smooth.hpp"

#include <chrono>
#include <cmath>

#include "covsel/spectral.hpp"

namespace covsel {

SmoothingParams make_params(double alpha, double beta, double rho,
                            Eigen::Index n, double epsilon) {
  if (!(alpha > 0) || !(alpha < beta)) throw InvalidInput("require 0 < alpha < beta");
  if (!(rho >= 0)) throw InvalidInput("rho must be >= 0");
  if (!(epsilon > 0)) throw InvalidInput("epsilon must be positive");
  const double nn = static_cast<double>(n);

  SmoothingParams p;
  p.epsilon = epsilon;
  p.d1_max = nn * std::log(beta / alpha);
  p.d2_max = nn * nn / 2.0;
  p.sigma1 = 1.0 / (beta * beta);
  p.sigma2 = 1.0;
  p.lipschitz_m = 1.0 / (alpha * alpha);
  p.op_norm_a = rho;
  if (rho > 0) {
    p.mu = epsilon / (nn * nn * rho * rho);
    p.lipschitz_l = p.lipschitz_m + 1.0 / p.mu;
  } else {
    p.mu = 0.0;  // unsmoothed fallback, penalty identically zero
    p.lipschitz_l = p.lipschitz_m;
  }
  return p;
}

double psi(double x, double mu, double rho) {
  if (!(mu > 0)) throw InvalidInput("psi requires mu > 0");
  if (!(rho >= 0)) throw InvalidInput("psi requires rho >= 0");
  const double ax = std::abs(x);
  if (ax >= mu * rho) {
    return rho * ax - 0.5 * mu * rho * rho;
  }
  return x * x / (2.0 * mu);
}

Eigen::MatrixXd u_star(const Eigen::MatrixXd& x, double mu, double rho) {
  if (!(mu > 0)) throw InvalidInput("u_star requires mu > 0");
  return (x / mu).cwiseMax(-rho).cwiseMin(rho);
}

FEps f_eps_and_grad(const SymMatrix& x, const SymMatrix& sigma,
                    const SmoothingParams& params) {
  const Eigen::Index n = x.n();
  if (n != sigma.n()) throw InvalidInput("dimension mismatch");
  Eigen::LLT<Eigen::MatrixXd> llt(x.mat());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(llt.matrixLLT()(i, i) > 0)) throw NotPositiveDefinite();
    logdet += std::log(llt.matrixLLT()(i, i));
  }
  logdet *= 2.0;
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));

  FEps r;
  r.value = -logdet + detail::trace_inner(sigma.mat(), x.mat());
  if (params.op_norm_a > 0) {
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        r.value += psi(x(i, j), params.mu, params.op_norm_a);
      }
    }
    r.grad = -inv + sigma.mat() + u_star(x.mat(), params.mu, params.op_norm_a);
  } else {
    r.grad = -inv + sigma.mat();
  }
  return r;
}

long iteration_bound(const SmoothingParams& p) {
  const double first =
      4.0 * p.op_norm_a / p.epsilon *
      std::sqrt(p.d1_max * p.d2_max / (p.sigma1 * p.sigma2));
  const double second = std::sqrt(p.lipschitz_m * p.d1_max / (p.sigma1 * p.epsilon));
  return static_cast<long>(std::ceil(first + second));
}

Solution solve_smooth(const ProblemInstance& problem, const SolverConfig& config,
                      const TraceCallback& trace) {
  problem.validate();
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const Bounds bounds = problem.effective_bounds();
  const double alpha = bounds.alpha;
  const double beta = bounds.beta;
  const double rho = problem.rho;
  const Eigen::Index n = problem.sigma.n();
  const Eigen::MatrixXd& sig = problem.sigma.mat();
  const SmoothingParams params = make_params(alpha, beta, rho, n, config.epsilon);
  const double lips = params.lipschitz_l;

  Eigen::MatrixXd x = beta * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd grad_accum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd u_hat = Eigen::MatrixXd::Zero(n, n);

  // With rho == 0 the dual average stays at 0, so phi is a constant.
  double phi_const = 0.0;
  if (rho == 0.0) {
    phi_const = detail::phi_shifted(sig, alpha, beta);
  }

  struct Best {
    double gap = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd y, u;
    double primal = 0, dual = 0;
  } best;

  long iters_done = 0;
  bool converged = false;

  for (long k = 0; k < config.max_iterations; ++k) {
    // Step 1: smoothed gradient at X_k.
    Eigen::LLT<Eigen::MatrixXd> llt(x);
    if (llt.info() != Eigen::Success) {
      throw NotPositiveDefinite("smooth iterate lost positive definiteness");
    }
    const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::MatrixXd ustar_x;
    Eigen::MatrixXd grad = -inv + sig;
    if (rho > 0) {
      ustar_x = u_star(x, params.mu, rho);
      grad += ustar_x;
    }

    // Step 2: gradient mapping, eigenvalue clipping of X - grad/L.
    Eigen::MatrixXd y = detail::project_box_spectrum(x - grad / lips, alpha, beta);

    // Step 3: estimate-sequence minimizer.
    grad_accum += (static_cast<double>(k) + 1.0) / 2.0 * grad;
    Eigen::MatrixXd z =
        detail::entropic_min((params.sigma1 / lips) * grad_accum, alpha, beta);

    // Step 4: next iterate and averaged dual.
    const double kk = static_cast<double>(k);
    x = (2.0 / (kk + 3.0)) * z + ((kk + 1.0) / (kk + 3.0)) * y;
    if (rho > 0) {
      u_hat = (kk * u_hat + 2.0 * ustar_x) / (kk + 2.0);
    }

    iters_done = k + 1;

    // Step 5: duality gap certificate.
    const bool check = (k % config.gap_check_every == 0) ||
                       (k + 1 == config.max_iterations);
    if (!check) continue;

    const double primal_part = detail::primal_min_part(y, sig, rho);
    const double dual_val =
        rho == 0.0 ? phi_const : detail::phi_shifted(sig + u_hat, alpha, beta);
    const double gap = primal_part - dual_val;
    if (trace) {
      trace(TracePoint{k, -primal_part, -dual_val, gap, elapsed()});
    }
    if (gap < best.gap) {
      best.gap = gap;
      best.y = y;
      best.u = u_hat;
      best.primal = -primal_part;
      best.dual = -dual_val;
    }
    if (best.gap <= config.epsilon) {
      converged = true;
      break;
    }
  }

  Solution sol;
  sol.x = SymMatrix(best.y);
  sol.u = SymMatrix(best.u.size() ? best.u : Eigen::MatrixXd::Zero(n, n));
  sol.primal_objective = best.primal;
  sol.dual_objective = best.dual;
  sol.gap = best.gap;
  sol.iterations = iters_done;
  sol.converged = converged;
  sol.wall_time_seconds = elapsed();
  return sol;
}

}  // namespace covsel
