#include "covsel/coordinate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "covsel/boxqp.hpp"
#include "covsel/smooth.hpp"
#include "covsel/spectral.hpp"

namespace covsel {

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& s, const std::vector<int>& perm) {
  const Eigen::Index m = static_cast<Eigen::Index>(perm.size());
  Eigen::MatrixXd out(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      out(a, b) = s(perm[a], perm[b]);
    }
  }
  return out;
}

Eigen::VectorXd gather_col(const Eigen::MatrixXd& s, const std::vector<int>& perm, int j) {
  const Eigen::Index m = static_cast<Eigen::Index>(perm.size());
  Eigen::VectorXd out(m);
  for (Eigen::Index a = 0; a < m; ++a) out[a] = s(perm[a], j);
  return out;
}

std::vector<int> indices_without(Eigen::Index n, int j) {
  std::vector<int> perm;
  perm.reserve(n - 1);
  for (int i = 0; i < n; ++i) {
    if (i != j) perm.push_back(i);
  }
  return perm;
}

Eigen::MatrixXd invert_pd(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite();
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

/// Replace the border row/column at slot p: the matrix underlying h changes
/// from border `current` to border `target` (entry p is the diagonal).
/// One rank-two Woodbury correction. Returns false on breakdown.
bool smw_replace_border(Eigen::MatrixXd& h, Eigen::Index p,
                        const Eigen::VectorXd& current, const Eigen::VectorXd& target) {
  Eigen::VectorXd d = target - current;
  if (d.cwiseAbs().maxCoeff() == 0.0) return true;
  Eigen::VectorXd dt = d;
  dt[p] *= 0.5;  // M_new = M + e_p dt^T + dt e_p^T

  const Eigen::VectorXd w1 = h.col(p);
  const Eigen::VectorXd w2 = h * dt;
  const double k00 = 1.0 + dt.dot(w1);
  const double k01 = dt.dot(w2);
  const double k10 = w1[p];
  const double k11 = 1.0 + w2[p];
  const double det = k00 * k11 - k01 * k10;
  const double scale = std::max({1.0, std::abs(k00), std::abs(k01),
                                 std::abs(k10), std::abs(k11)});
  if (std::abs(det) < 1e-12 * scale) return false;

  const double a00 = k11 / det, a01 = -k01 / det;
  const double a10 = -k10 / det, a11 = k00 / det;
  const Eigen::VectorXd r1 = a00 * w2 + a01 * w1;
  const Eigen::VectorXd r2 = a10 * w2 + a11 * w1;
  h.noalias() -= w1 * r1.transpose();
  h.noalias() -= w2 * r2.transpose();
  h = 0.5 * (h + h.transpose());
  return true;
}

void refactor_for_exclusion(DescentState& state, int j) {
  state.perm = indices_without(state.s.rows(), j);
  state.inv_av = invert_pd(gather(state.s, state.perm));
  state.excluded = j;
}

struct GapInfo {
  double primal = 0;
  double dual = 0;
  double gap = std::numeric_limits<double>::infinity();
  double identity = std::numeric_limits<double>::infinity();  // gap_block value
  bool usable = false;
};

}  // namespace

BlockView block_view(const SymMatrix& sigma, const Eigen::MatrixXd& u,
                     const std::vector<int>& perm, int j) {
  BlockView v;
  v.j = j;
  v.sub_a = gather(sigma.mat(), perm);
  v.sub_v = gather(u, perm);
  v.b = gather_col(sigma.mat(), perm, j);
  v.c = sigma(j, j);
  return v;
}

DescentState init_descent(const SymMatrix& sigma, double rho) {
  const Eigen::Index n = sigma.n();
  DescentState state;
  state.u = rho * Eigen::MatrixXd::Identity(n, n);
  state.s = sigma.mat() + state.u;
  if (n > 1) {
    refactor_for_exclusion(state, 0);
  } else {
    state.excluded = 0;
    state.inv_av.resize(0, 0);
    // 1x1 problems have no off-diagonal block; still require s > 0
    if (!(state.s(0, 0) > 0)) throw NotPositiveDefinite();
  }
  return state;
}

void descent_column_step(DescentState& state, int j, const SymMatrix& sigma,
                         double rho, double qp_epsilon) {
  if (state.excluded != j) throw InvalidInput("inverse not positioned at column j");
  const Eigen::Index n = sigma.n();
  state.u(j, j) = rho;
  state.s(j, j) = sigma(j, j) + rho;
  if (n == 1) return;

  const Eigen::VectorXd b = gather_col(sigma.mat(), state.perm, j);
  const Eigen::VectorXd u_cur = gather_col(state.u, state.perm, j);

  BoxQP qp{state.inv_av, 2.0 * (state.inv_av * b), rho};
  const BoxQPResult res = solve_boxqp(qp, qp_epsilon, u_cur);

  const auto quad = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd bu = b + u;
    return bu.dot(state.inv_av * bu);
  };
  if (!res.certified && quad(res.x) > quad(u_cur)) {
    ++state.skipped_columns;
    return;
  }
  for (Eigen::Index a = 0; a < res.x.size(); ++a) {
    const int i = state.perm[a];
    state.u(i, j) = res.x[a];
    state.u(j, i) = res.x[a];
    state.s(i, j) = sigma(i, j) + res.x[a];
    state.s(j, i) = state.s(i, j);
  }
}

void smw_maintain(DescentState& state, int j_out, int j_in) {
  if (state.excluded != j_out) throw InvalidInput("inverse not positioned at j_out");
  if (j_out == j_in) return;
  const Eigen::Index n = state.s.rows();
  if (n <= 1) {
    state.excluded = j_in;
    return;
  }
  const auto it = std::find(state.perm.begin(), state.perm.end(), j_in);
  if (it == state.perm.end()) throw InvalidInput("j_in not covered by the inverse");
  const Eigen::Index p = it - state.perm.begin();

  // Remove the effect of row/column j_in: neutralize slot p to e_p.
  Eigen::VectorXd cur = gather_col(state.s, state.perm, j_in);
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(state.perm.size());
  unit[p] = 1.0;
  if (!smw_replace_border(state.inv_av, p, cur, unit)) {
    refactor_for_exclusion(state, j_in);
    return;
  }
  // Reinstate row/column j_out with its updated values.
  state.perm[p] = j_out;
  Eigen::VectorXd next = gather_col(state.s, state.perm, j_out);
  if (!smw_replace_border(state.inv_av, p, unit, next)) {
    refactor_for_exclusion(state, j_in);
    return;
  }
  state.excluded = j_in;
}

void refactor_inverse(DescentState& state) {
  const Eigen::Index n = state.s.rows();
  if (n <= 1) return;
  const Eigen::MatrixXd m = gather(state.s, state.perm);
  const Eigen::Index mm = m.rows();
  state.last_refactor_drift =
      (state.inv_av * m - Eigen::MatrixXd::Identity(mm, mm)).cwiseAbs().maxCoeff();
  state.inv_av = invert_pd(m);
}

namespace {

GapInfo descent_gap(const DescentState& state, const Eigen::MatrixXd& sig, double rho) {
  GapInfo g;
  Eigen::LLT<Eigen::MatrixXd> llt(state.s);
  if (llt.info() != Eigen::Success) return g;
  const Eigen::Index n = sig.rows();
  Eigen::MatrixXd x = llt.solve(Eigen::MatrixXd::Identity(n, n));
  x = 0.5 * (x + x.transpose());
  g.primal = -detail::primal_min_part(x, sig, rho);
  g.dual = detail::block_dual_objective(state.u, sig);
  g.gap = g.dual - g.primal;
  g.identity = detail::trace_inner(sig, x) - static_cast<double>(n) +
               rho * detail::l1_all(x);
  g.usable = true;
  return g;
}

}  // namespace

Solution solve_descent(const ProblemInstance& problem, const SolverConfig& config,
                       const TraceCallback& trace) {
  problem.validate();
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const Eigen::MatrixXd& sig = problem.sigma.mat();
  const Eigen::Index n = problem.sigma.n();
  const double rho = problem.rho;
  // Split the subproblem budget over the n columns. The budget is tightened
  // whenever a sweep stalls above the target gap: the slack-to-gap constant
  // depends on the conditioning of sigma + u, so no fixed tolerance fits all
  // instances.
  double qp_eps = config.subqp_eps() / static_cast<double>(n);

  DescentState state = init_descent(problem.sigma, rho);
  bool converged = false;
  double prev_gap = std::numeric_limits<double>::infinity();

  for (long sweep = 1; sweep <= config.max_iterations; ++sweep) {
    for (int j = 0; j < n; ++j) {
      if (state.excluded != j) smw_maintain(state, state.excluded, j);
      descent_column_step(state, j, problem.sigma, rho, qp_eps);
    }
    state.sweep = sweep;
    if (sweep % config.refactor_every == 0) refactor_inverse(state);

    const GapInfo g = descent_gap(state, sig, rho);
    if (trace && g.usable) {
      trace(TracePoint{sweep, g.primal, g.dual, g.gap, elapsed()});
    }
    if (g.usable && g.gap <= config.epsilon && g.identity <= config.epsilon) {
      converged = true;
      break;
    }
    if (g.usable && g.gap > 0.5 * prev_gap && qp_eps > 1e-18) {
      qp_eps = std::max(qp_eps * 1e-2, 1e-18);
    }
    if (g.usable) prev_gap = g.gap;
  }

  Eigen::MatrixXd x = invert_pd(state.s);
  const auto comp = detail::solution_gap(SolverKind::BlockDescent, x, state.u,
                                         sig, rho, 0, 0);
  Solution sol;
  sol.x = SymMatrix(x);
  sol.u = SymMatrix(state.u);
  sol.primal_objective = comp.primal;
  sol.dual_objective = comp.dual;
  sol.gap = comp.gap;
  sol.iterations = state.sweep;
  sol.converged = converged;
  sol.wall_time_seconds = elapsed();
  return sol;
}

AscentState init_ascent(const SymMatrix& sigma, double rho) {
  const Eigen::Index n = sigma.n();
  AscentState state;
  state.x = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = sigma(j, j) + rho;
    if (!(d > 0)) throw NotPositiveDefinite("sigma_jj + rho must be positive");
    state.x(j, j) = 1.0 / d;
  }
  state.u = rho * Eigen::MatrixXd::Identity(n, n);
  return state;
}

void ascent_column_step(AscentState& state, int j, const SymMatrix& sigma,
                        double rho, double qp_epsilon) {
  const Eigen::Index n = sigma.n();
  const double c = sigma(j, j);
  if (!(c + rho > 0)) throw NotPositiveDefinite("sigma_jj + rho must be positive");
  state.u(j, j) = rho;
  if (n == 1) {
    state.x(0, 0) = 1.0 / (c + rho);
    return;
  }

  const std::vector<int> perm = indices_without(n, j);
  const Eigen::MatrixXd z = gather(state.x, perm);
  const Eigen::VectorXd b = gather_col(sigma.mat(), perm, j);
  const Eigen::VectorXd u_cur = gather_col(state.u, perm, j);

  BoxQP qp{z, 2.0 * (z * b), rho};
  const BoxQPResult res = solve_boxqp(qp, qp_epsilon, u_cur);

  const auto quad = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd bu = b + u;
    return bu.dot(z * bu);
  };
  if (!res.certified && quad(res.x) > quad(u_cur)) {
    ++state.skipped_columns;
    return;
  }

  const Eigen::VectorXd bu = b + res.x;
  const double q = bu.dot(z * bu);
  const Eigen::VectorXd xcol = -(z * bu) / (c + rho);
  const double y = 1.0 / (c + rho) + q / ((c + rho) * (c + rho));

  for (Eigen::Index a = 0; a < xcol.size(); ++a) {
    const int i = perm[a];
    state.x(i, j) = xcol[a];
    state.x(j, i) = xcol[a];
    const double ua = std::clamp(res.x[a], -rho, rho);
    state.u(i, j) = ua;
    state.u(j, i) = ua;
  }
  state.x(j, j) = y;
}

namespace {

GapInfo ascent_gap(const AscentState& state, const Eigen::MatrixXd& sig, double rho,
                   const std::optional<Bounds>& bounds) {
  GapInfo g;
  const Eigen::MatrixXd s = sig + state.u;
  double primal;
  try {
    primal = -detail::primal_min_part(state.x, sig, rho);
  } catch (const NotPositiveDefinite&) {
    return g;
  }
  if (detail::inverse_consistent(state.x, s)) {
    g.primal = primal;
    g.dual = detail::block_dual_objective(state.u, sig);
    g.gap = g.dual - g.primal;
    g.identity = detail::trace_inner(sig, state.x) - static_cast<double>(sig.rows()) +
                 rho * detail::l1_all(state.x);
    g.usable = true;
  } else if (bounds) {
    g.primal = primal;
    g.dual = -detail::phi_shifted(s, bounds->alpha, bounds->beta);
    g.gap = g.dual - g.primal;
    g.identity = g.gap;  // no inverse consistency yet; certify on the pair alone
    g.usable = true;
  }
  return g;
}

}  // namespace

Solution solve_ascent(const ProblemInstance& problem, const SolverConfig& config,
                      const TraceCallback& trace) {
  problem.validate();
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const Eigen::MatrixXd& sig = problem.sigma.mat();
  const Eigen::Index n = problem.sigma.n();
  const double rho = problem.rho;
  double qp_eps = config.subqp_eps() / static_cast<double>(n);

  std::optional<Bounds> fallback_bounds;
  if (problem.bounds) {
    fallback_bounds = problem.bounds;
  } else if (rho > 0) {
    fallback_bounds = auto_bounds(problem.sigma, rho);
  }

  AscentState state = init_ascent(problem.sigma, rho);
  bool converged = false;
  double prev_gap = std::numeric_limits<double>::infinity();

  for (long sweep = 1; sweep <= config.max_iterations; ++sweep) {
    for (int j = 0; j < n; ++j) {
      ascent_column_step(state, j, problem.sigma, rho, qp_eps);
    }
    state.sweep = sweep;

    const GapInfo g = ascent_gap(state, sig, rho, fallback_bounds);
    if (trace && g.usable) {
      trace(TracePoint{sweep, g.primal, g.dual, g.gap, elapsed()});
    }
    if (g.usable && g.gap <= config.epsilon && g.identity <= config.epsilon) {
      converged = true;
      break;
    }
    if (g.usable && g.gap > 0.5 * prev_gap && qp_eps > 1e-18) {
      qp_eps = std::max(qp_eps * 1e-2, 1e-18);
    }
    if (g.usable) prev_gap = g.gap;
  }

  const double a = fallback_bounds ? fallback_bounds->alpha : 0;
  const double b = fallback_bounds ? fallback_bounds->beta : 0;
  const auto comp = detail::solution_gap(SolverKind::BlockAscent, state.x, state.u,
                                         sig, rho, a, b);
  Solution sol;
  sol.x = SymMatrix(state.x);
  sol.u = SymMatrix(state.u);
  sol.primal_objective = comp.primal;
  sol.dual_objective = comp.dual;
  sol.gap = comp.gap;
  sol.iterations = state.sweep;
  sol.converged = converged;
  sol.wall_time_seconds = elapsed();
  return sol;
}

Solution solve(const ProblemInstance& problem, const SolverConfig& config,
               const TraceCallback& trace) {
  switch (config.solver) {
    case SolverKind::Smooth:
      return solve_smooth(problem, config, trace);
    case SolverKind::BlockDescent:
      return solve_descent(problem, config, trace);
    case SolverKind::BlockAscent:
      return solve_ascent(problem, config, trace);
  }
  throw InvalidInput("unknown solver");
}

}  // namespace covsel
