#pragma once

#include <string>

#include "covsel/model.hpp"

namespace covsel {

/// Dense text matrix format: first line n, then n rows of n decimals
/// (17 significant digits on write, so values round-trip exactly).
void write_matrix_file(const std::string& path, const SymMatrix& m);
SymMatrix read_matrix_file(const std::string& path);

/// Key-value solve report; x and u are row-major n^2 decimal arrays.
struct SolutionReport {
  std::string solver;
  long n = 0;
  double rho = 0;
  double alpha = 0;
  double beta = 0;
  double epsilon = 0;
  long iterations = 0;
  long sweeps = -1;  // coordinate solvers only; -1 means absent
  double primal_objective = 0;
  double dual_objective = 0;
  double gap = 0;
  bool converged = false;
  double wall_time_seconds = 0;
  Eigen::MatrixXd x;
  Eigen::MatrixXd u;
};

SolutionReport make_report(SolverKind kind, const ProblemInstance& problem,
                           const SolverConfig& config, const Solution& sol);
void write_report(const std::string& path, const SolutionReport& report);
SolutionReport read_report(const std::string& path);

const char* solver_name(SolverKind kind);
SolverKind solver_from_name(const std::string& name);

/// Recomputes the duality gap of a report from its x, u and the original
/// covariance; matches the stored gap to high relative accuracy.
double report_recomputed_gap(const SolutionReport& report, const SymMatrix& sigma);

std::string format_double(double v);  // shortest-17 round-trip form

}  // namespace covsel
