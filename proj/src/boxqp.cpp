#include "covsel/boxqp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "covsel/spectral.hpp"

namespace covsel {

namespace {

double objective(const Eigen::MatrixXd& q, const Eigen::VectorXd& b,
                 const Eigen::VectorXd& x) {
  return x.dot(q * x) + b.dot(x);
}

void validate(const BoxQP& p) {
  if (p.q.rows() != p.q.cols() || p.q.rows() != p.b.size()) {
    throw InvalidInput("boxqp dimension mismatch");
  }
  if (!(p.rho >= 0)) throw InvalidInput("boxqp rho must be >= 0");
}

}  // namespace

namespace detail {

void extreme_eigs(const Eigen::MatrixXd& q, double& lmax, double& lmin) {
  const Eigen::Index m = q.rows();
  if (m == 0) {
    lmax = lmin = 0;
    return;
  }
  if (m == 1) {
    lmax = lmin = q(0, 0);
    return;
  }
  if (m <= 64) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw EigenFailure("eigenvalue solve failed");
    lmin = es.eigenvalues()[0];
    lmax = es.eigenvalues()[m - 1];
    return;
  }
  // Power iteration with a deterministic start; the callers apply safety
  // factors, so modest accuracy is enough.
  auto power = [&](const Eigen::MatrixXd& a) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
    for (Eigen::Index i = 0; i < m; ++i) v[i] += 1e-3 * static_cast<double>(i % 13);
    v.normalize();
    double est = 0;
    for (int it = 0; it < 120; ++it) {
      Eigen::VectorXd w = a * v;
      const double nw = w.norm();
      if (nw == 0) return 0.0;
      w /= nw;
      const double e = w.dot(a * w);
      if (it > 8 && std::abs(e - est) <= 1e-8 * std::max(1.0, std::abs(e))) {
        return e;
      }
      est = e;
      v = w;
    }
    return est;
  };
  lmax = power(q);
  const double shift = std::max(lmax, 0.0) * 1.05 + 1e-12;
  lmin = shift - power(shift * Eigen::MatrixXd::Identity(m, m) - q);
}

}  // namespace detail

Eigen::VectorXd project_box(const Eigen::VectorXd& x, double rho) {
  if (!(rho >= 0)) throw InvalidInput("rho must be >= 0");
  return x.cwiseMax(-rho).cwiseMin(rho);
}

double kkt_residual(const BoxQP& p, const Eigen::VectorXd& x) {
  validate(p);
  if (x.size() != p.b.size()) throw InvalidInput("kkt dimension mismatch");
  const Eigen::VectorXd g = 2.0 * (p.q * x) + p.b;
  const Eigen::VectorXd step = project_box(x - g, p.rho);
  if (x.size() == 0) return 0.0;
  return (x - step).cwiseAbs().maxCoeff();
}

BoxQPResult solve_boxqp(const BoxQP& p, double epsilon,
                        const std::optional<Eigen::VectorXd>& x0,
                        long max_iterations) {
  validate(p);
  if (!(epsilon > 0)) throw InvalidInput("epsilon must be positive");
  const Eigen::Index m = p.b.size();

  BoxQPResult res;
  if (m == 0 || p.rho == 0.0) {
    res.x = Eigen::VectorXd::Zero(m);
    res.objective = 0.0;
    res.certified = true;
    return res;
  }

  double lmax = 0, lmin = 0;
  detail::extreme_eigs(p.q, lmax, lmin);
  if (lmin < -1e-8 * std::max(lmax, 1e-300)) {
    throw InvalidInput("boxqp matrix must be positive semidefinite");
  }
  Eigen::MatrixXd qw = p.q;
  if (lmin < 0) {
    qw += (1e-12 * std::max(lmax, 1.0)) * Eigen::MatrixXd::Identity(m, m);
    lmin = 0;
  }
  const double lips = std::max(2.0 * lmax * 1.05, 1e-12);
  const double modulus = 2.0 * std::max(lmin, 0.0);  // f is modulus-strongly convex

  // Exact suboptimality certificate from the quadratic lower model:
  // f(x) - f* <= max_{z in B} g^T (x - z) - (modulus/2) ||x - z||^2,
  // separable in the coordinates t_i = x_i - z_i in [x_i - rho, x_i + rho].
  const auto subopt_bound = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    double s = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double lo = x[i] - p.rho;
      const double hi = x[i] + p.rho;
      double t;
      if (modulus > 0) {
        t = std::clamp(g[i] / modulus, lo, hi);
      } else {
        t = g[i] >= 0 ? hi : lo;
      }
      s += g[i] * t - 0.5 * modulus * t * t;
    }
    return s;
  };

  Eigen::VectorXd x = x0 ? project_box(*x0, p.rho) : Eigen::VectorXd::Zero(m);
  Eigen::VectorXd y = x;
  Eigen::VectorXd x_prev = x;
  double t = 1.0;
  double f_prev = objective(p.q, p.b, x);

  {
    const Eigen::VectorXd g0 = 2.0 * (qw * x) + p.b;
    res.x = x;
    res.objective = f_prev;
    res.kkt = (x - project_box(x - g0, p.rho)).cwiseAbs().maxCoeff();
    if (subopt_bound(x, g0) <= epsilon) {
      res.certified = true;
      return res;
    }
  }

  for (long k = 0; k < max_iterations; ++k) {
    const Eigen::VectorXd g = 2.0 * (qw * y) + p.b;
    Eigen::VectorXd x_new = project_box(y - g / lips, p.rho);
    const double f_new = objective(p.q, p.b, x_new);

    const Eigen::VectorXd gx = 2.0 * (qw * x_new) + p.b;
    const double kkt = (x_new - project_box(x_new - gx, p.rho)).cwiseAbs().maxCoeff();
    if (f_new < res.objective) {
      res.objective = f_new;
      res.x = x_new;
      res.kkt = kkt;
    }
    res.iterations = k + 1;
    if (subopt_bound(x_new, gx) <= epsilon) {
      res.x = x_new;
      res.objective = f_new;
      res.kkt = kkt;
      res.certified = true;
      return res;
    }

    if (f_new > f_prev) {
      // function restart
      t = 1.0;
      y = x_new;
    } else {
      const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = x_new + ((t - 1.0) / t_new) * (x_new - x_prev);
      y = project_box(y, p.rho);
      t = t_new;
    }
    x_prev = x_new;
    f_prev = f_new;
  }
  res.certified = false;
  return res;
}

BoxQPResult oracle_boxqp(const BoxQP& p) {
  validate(p);
  const Eigen::Index m = p.b.size();
  if (m > 8) throw OracleTooLarge("oracle supports at most m = 8");

  BoxQPResult res;
  if (m == 0 || p.rho == 0.0) {
    res.x = Eigen::VectorXd::Zero(m);
    res.objective = 0.0;
    res.certified = true;
    return res;
  }

  long patterns = 1;
  for (Eigen::Index i = 0; i < m; ++i) patterns *= 3;

  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;

  std::vector<int> digit(m);
  for (long code = 0; code < patterns; ++code) {
    long c = code;
    std::vector<Eigen::Index> free_idx;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      digit[i] = static_cast<int>(c % 3);
      c /= 3;
      if (digit[i] == 0) x[i] = -p.rho;
      else if (digit[i] == 2) x[i] = p.rho;
      else free_idx.push_back(i);
    }
    const Eigen::Index f = static_cast<Eigen::Index>(free_idx.size());
    if (f > 0) {
      Eigen::MatrixXd qff(f, f);
      Eigen::VectorXd rhs(f);
      for (Eigen::Index a = 0; a < f; ++a) {
        for (Eigen::Index bb = 0; bb < f; ++bb) {
          qff(a, bb) = p.q(free_idx[a], free_idx[bb]);
        }
        double cross = 0;
        for (Eigen::Index j = 0; j < m; ++j) {
          if (digit[j] != 1) cross += p.q(free_idx[a], j) * x[j];
        }
        rhs[a] = -(0.5 * p.b[free_idx[a]] + cross);
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(qff);
      if (ldlt.info() != Eigen::Success) continue;
      Eigen::VectorXd xf = ldlt.solve(rhs);
      if ((qff * xf - rhs).cwiseAbs().maxCoeff() >
          1e-8 * (1.0 + rhs.cwiseAbs().maxCoeff())) {
        continue;  // singular free block
      }
      if (xf.cwiseAbs().maxCoeff() > p.rho + 1e-12) continue;
      for (Eigen::Index a = 0; a < f; ++a) {
        x[free_idx[a]] = std::clamp(xf[a], -p.rho, p.rho);
      }
    }
    const double val = objective(p.q, p.b, x);
    if (val < best) {
      best = val;
      best_x = x;
    }
  }
  res.x = best_x;
  res.objective = best;
  res.certified = true;
  return res;
}

}  // namespace covsel
