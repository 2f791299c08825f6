#pragma once

#include <vector>

#include "covsel/model.hpp"

namespace covsel {

/// Column view for the block subproblems: principal submatrices of sigma
/// and u with row/column j removed (in `perm` order), the off-diagonal
/// column b and the diagonal entry c.
struct BlockView {
  int j = 0;
  Eigen::MatrixXd sub_a;
  Eigen::MatrixXd sub_v;
  Eigen::VectorXd b;
  double c = 0;
};

BlockView block_view(const SymMatrix& sigma, const Eigen::MatrixXd& u,
                     const std::vector<int>& perm, int j);

/// Dual block-coordinate descent state. inv_av is the maintained inverse of
/// (sigma + u) restricted to the rows/columns listed in perm (every index
/// except `excluded`); slot p of inv_av corresponds to original index perm[p].
struct DescentState {
  Eigen::MatrixXd u;       // dual iterate, diagonal fixed at rho
  Eigen::MatrixXd s;       // sigma + u, kept in sync with u
  Eigen::MatrixXd inv_av;  // inverse of s(perm, perm)
  std::vector<int> perm;
  int excluded = -1;
  long sweep = 0;
  long skipped_columns = 0;
  double last_refactor_drift = 0;
};

DescentState init_descent(const SymMatrix& sigma, double rho);

/// Solves the column-j box QP against the maintained inverse and writes the
/// optimizing u into row/column j (diagonal set to rho). The dual objective
/// -log det(sigma + u) does not increase.
void descent_column_step(DescentState& state, int j, const SymMatrix& sigma,
                         double rho, double qp_epsilon);

/// Moves the maintained inverse from excluding j_out to excluding j_in by
/// two rank-two SMW corrections (remove row/column j_in, reinstate j_out).
/// A small SMW denominator triggers a full refactorization instead.
void smw_maintain(DescentState& state, int j_out, int j_in);

/// Recomputes inv_av from scratch for the current exclusion and records the
/// max-norm drift of the maintained inverse it replaces.
void refactor_inverse(DescentState& state);

Solution solve_descent(const ProblemInstance& problem, const SolverConfig& config,
                       const TraceCallback& trace = {});

/// Primal block-coordinate ascent state; u collects the per-column QP
/// multipliers as the dual certificate (diagonal rho).
struct AscentState {
  Eigen::MatrixXd x;
  Eigen::MatrixXd u;
  long sweep = 0;
  long skipped_columns = 0;
};

AscentState init_ascent(const SymMatrix& sigma, double rho);

/// Solves the column-j dual QP on the current minor Z of x and writes the
/// recovered column/diagonal into x. The primal objective does not decrease.
void ascent_column_step(AscentState& state, int j, const SymMatrix& sigma,
                        double rho, double qp_epsilon);

Solution solve_ascent(const ProblemInstance& problem, const SolverConfig& config,
                      const TraceCallback& trace = {});

/// Dispatch on config.solver.
Solution solve(const ProblemInstance& problem, const SolverConfig& config,
               const TraceCallback& trace = {});

}  // namespace covsel
