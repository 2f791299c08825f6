#include "covsel/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "covsel/spectral.hpp"

namespace covsel {

namespace detail {

double l1_all(const Eigen::MatrixXd& m) { return m.cwiseAbs().sum(); }

double trace_inner(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

double logdet_pd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite();
  }
  const auto& l = llt.matrixLLT();
  double ld = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (!(l(i, i) > 0.0)) throw NotPositiveDefinite();
    ld += std::log(l(i, i));
  }
  return 2.0 * ld;
}

double primal_min_part(const Eigen::MatrixXd& x, const Eigen::MatrixXd& sigma, double rho) {
  return -logdet_pd(x) + trace_inner(sigma, x) + rho * l1_all(x);
}

double block_dual_objective(const Eigen::MatrixXd& u, const Eigen::MatrixXd& sigma) {
  return -logdet_pd(sigma + u) - static_cast<double>(sigma.rows());
}

bool inverse_consistent(const Eigen::MatrixXd& x, const Eigen::MatrixXd& s) {
  const Eigen::Index n = s.rows();
  const double r = (x * s - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
  return r <= 1e-8;
}

GapComponents solution_gap(SolverKind kind, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& u, const Eigen::MatrixXd& sigma,
                           double rho, double alpha, double beta) {
  GapComponents g{};
  g.primal = -primal_min_part(x, sigma, rho);
  switch (kind) {
    case SolverKind::Smooth:
      g.dual = -phi_shifted(sigma + u, alpha, beta);
      break;
    case SolverKind::BlockDescent:
      g.dual = block_dual_objective(u, sigma);
      break;
    case SolverKind::BlockAscent:
      if (inverse_consistent(x, sigma + u)) {
        g.dual = block_dual_objective(u, sigma);
      } else if (alpha > 0 && alpha < beta) {
        g.dual = -phi_shifted(sigma + u, alpha, beta);
      } else {
        g.dual = std::numeric_limits<double>::infinity();
      }
      break;
  }
  g.gap = g.dual - g.primal;
  return g;
}

}  // namespace detail

void ProblemInstance::validate() const {
  const Eigen::Index n = sigma.n();
  if (n < 1) throw InvalidInput("sigma must be at least 1x1");
  if (!(rho >= 0) || !std::isfinite(rho)) throw InvalidInput("rho must be finite and >= 0");
  EigenPair ep = sym_eig(sigma);
  const double norm2 = std::max(std::abs(ep.values[0]), std::abs(ep.values[n - 1]));
  if (ep.values[0] < -1e-8 * norm2) {
    throw InvalidInput("sigma must be positive semidefinite");
  }
  if (bounds) {
    if (!(bounds->alpha > 0) || !(bounds->alpha < bounds->beta) ||
        !std::isfinite(bounds->beta)) {
      throw InvalidInput("explicit bounds require 0 < alpha < beta < inf");
    }
  }
}

Bounds ProblemInstance::effective_bounds() const {
  if (bounds) return *bounds;
  return auto_bounds(sigma, rho);
}

void SolverConfig::validate() const {
  if (!(epsilon > 0)) throw InvalidInput("epsilon must be positive");
  if (max_iterations < 1) throw InvalidInput("max_iterations must be positive");
  if (subqp_epsilon > 0 && subqp_epsilon > epsilon / 10.0) {
    throw InvalidInput("subqp_epsilon must not exceed epsilon/10");
  }
  if (refactor_every < 1) throw InvalidInput("refactor_every must be positive");
  if (gap_check_every < 1) throw InvalidInput("gap_check_every must be positive");
}

double primal_objective(const SymMatrix& x, const SymMatrix& sigma, double rho) {
  if (x.n() != sigma.n()) throw InvalidInput("dimension mismatch");
  return -detail::primal_min_part(x.mat(), sigma.mat(), rho);
}

Bounds auto_bounds(const SymMatrix& sigma, double rho) {
  if (!(rho > 0)) throw InvalidPenalty();
  const Eigen::Index n = sigma.n();
  EigenPair ep = detail::sym_eig(sigma.mat());
  const double norm2 = std::max(std::abs(ep.values[0]), std::abs(ep.values[n - 1]));
  const double lam_min = ep.values[0];

  Bounds b;
  b.alpha = 1.0 / (norm2 + static_cast<double>(n) * rho);
  if (lam_min <= 1e-12 * norm2) {
    b.beta = static_cast<double>(n) / rho;  // singular branch, 1/rho only
  } else {
    b.beta = static_cast<double>(n) * std::min(1.0 / rho, 1.0 / lam_min);
  }
  // Degenerate only for sigma == 0 at n == 1, where both formulas give 1/rho.
  if (!(b.alpha < b.beta)) {
    b.alpha = 0.5 * b.beta;
  }
  return b;
}

double gap_block(const SymMatrix& x, const SymMatrix& sigma, double rho) {
  if (x.n() != sigma.n()) throw InvalidInput("dimension mismatch");
  return detail::trace_inner(sigma.mat(), x.mat()) - static_cast<double>(x.n()) +
         rho * detail::l1_all(x.mat());
}

double gap_smooth(const SymMatrix& y, const SymMatrix& u_hat,
                  const SymMatrix& sigma, double rho, double alpha, double beta) {
  if (y.n() != sigma.n() || u_hat.n() != sigma.n()) {
    throw InvalidInput("dimension mismatch");
  }
  if (!(alpha < beta) || !(alpha > 0)) throw InvalidInput("require 0 < alpha < beta");
  EigenPair ep = detail::sym_eig(y.mat());
  const double feas_tol = 1e-7 * (1.0 + std::abs(beta));
  if (ep.values[0] < alpha - feas_tol || ep.values[y.n() - 1] > beta + feas_tol) {
    throw InfeasibleIterate("y is outside the eigenvalue box");
  }
  if (u_hat.mat().cwiseAbs().maxCoeff() > rho + 1e-9 * (1.0 + rho)) {
    throw InfeasibleIterate("u_hat is outside the dual box");
  }
  double logdet_y = 0.0;
  for (Eigen::Index i = 0; i < y.n(); ++i) logdet_y += std::log(ep.values[i]);
  const double primal_part = -logdet_y + detail::trace_inner(sigma.mat(), y.mat()) +
                             rho * detail::l1_all(y.mat());
  return primal_part - detail::phi_shifted(sigma.mat() + u_hat.mat(), alpha, beta);
}

double rho_information_criterion(InfoCriterion criterion, long sample_size) {
  switch (criterion) {
    case InfoCriterion::AIC:
      if (sample_size < 1) throw InvalidSampleSize("AIC requires N >= 1");
      return 2.0 / static_cast<double>(sample_size);
    case InfoCriterion::BIC:
      if (sample_size < 3) throw InvalidSampleSize("BIC requires N >= 3");
      return 2.0 * std::log(static_cast<double>(sample_size) / 2.0) /
             static_cast<double>(sample_size);
  }
  throw InvalidInput("unknown criterion");
}

long card(const SymMatrix& x, double threshold) {
  if (!(threshold >= 0)) throw InvalidInput("threshold must be >= 0");
  return (x.mat().cwiseAbs().array() > threshold).count();
}

}  // namespace covsel
