#include "covsel/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace covsel {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_file(const std::string& path, const SymMatrix& m) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  const Eigen::Index n = m.n();
  out << n << "\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j) out << ' ';
      out << format_double(m(i, j));
    }
    out << "\n";
  }
  if (!out) throw InvalidInput("write failed: " + path);
}

SymMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open: " + path);
  Eigen::Index n = 0;
  if (!(in >> n) || n < 1) throw InvalidInput("bad matrix header in " + path);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(in >> m(i, j))) throw InvalidInput("truncated matrix in " + path);
    }
  }
  return SymMatrix(m);
}

const char* solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::Smooth: return "smooth";
    case SolverKind::BlockDescent: return "block-descent";
    case SolverKind::BlockAscent: return "block-ascent";
  }
  return "unknown";
}

SolverKind solver_from_name(const std::string& name) {
  if (name == "smooth") return SolverKind::Smooth;
  if (name == "block-descent") return SolverKind::BlockDescent;
  if (name == "block-ascent") return SolverKind::BlockAscent;
  throw InvalidInput("unknown solver: " + name);
}

SolutionReport make_report(SolverKind kind, const ProblemInstance& problem,
                           const SolverConfig& config, const Solution& sol) {
  SolutionReport r;
  r.solver = solver_name(kind);
  r.n = problem.sigma.n();
  r.rho = problem.rho;
  if (problem.bounds || problem.rho > 0) {
    const Bounds b = problem.effective_bounds();
    r.alpha = b.alpha;
    r.beta = b.beta;
  }
  r.epsilon = config.epsilon;
  r.iterations = sol.iterations;
  if (kind != SolverKind::Smooth) r.sweeps = sol.iterations;
  r.primal_objective = sol.primal_objective;
  r.dual_objective = sol.dual_objective;
  r.gap = sol.gap;
  r.converged = sol.converged;
  r.wall_time_seconds = sol.wall_time_seconds;
  r.x = sol.x.mat();
  r.u = sol.u.mat();
  return r;
}

namespace {

void write_array(std::ofstream& out, const char* key, const Eigen::MatrixXd& m) {
  out << key;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << ' ' << format_double(m(i, j));
    }
  }
  out << "\n";
}

Eigen::MatrixXd parse_array(const std::string& line, long n) {
  std::istringstream in(line);
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(in >> m(i, j))) throw InvalidInput("truncated report array");
    }
  }
  return m;
}

}  // namespace

void write_report(const std::string& path, const SolutionReport& r) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open for writing: " + path);
  out << "solver " << r.solver << "\n";
  out << "n " << r.n << "\n";
  out << "rho " << format_double(r.rho) << "\n";
  out << "alpha " << format_double(r.alpha) << "\n";
  out << "beta " << format_double(r.beta) << "\n";
  out << "epsilon " << format_double(r.epsilon) << "\n";
  out << "iterations " << r.iterations << "\n";
  if (r.sweeps >= 0) out << "sweeps " << r.sweeps << "\n";
  out << "primal_objective " << format_double(r.primal_objective) << "\n";
  out << "dual_objective " << format_double(r.dual_objective) << "\n";
  out << "gap " << format_double(r.gap) << "\n";
  out << "converged " << (r.converged ? "true" : "false") << "\n";
  out << "wall_time_seconds " << format_double(r.wall_time_seconds) << "\n";
  write_array(out, "x", r.x);
  write_array(out, "u", r.u);
  if (!out) throw InvalidInput("write failed: " + path);
}

SolutionReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw InvalidInput("malformed report line: " + line);
    kv[line.substr(0, sp)] = line.substr(sp + 1);
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw InvalidInput(std::string("report missing key: ") + key);
    return it->second;
  };
  SolutionReport r;
  r.solver = need("solver");
  r.n = std::stol(need("n"));
  if (r.n < 1) throw InvalidInput("bad report dimension");
  r.rho = std::stod(need("rho"));
  r.alpha = std::stod(need("alpha"));
  r.beta = std::stod(need("beta"));
  r.epsilon = std::stod(need("epsilon"));
  r.iterations = std::stol(need("iterations"));
  r.sweeps = kv.count("sweeps") ? std::stol(kv["sweeps"]) : -1;
  r.primal_objective = std::stod(need("primal_objective"));
  r.dual_objective = std::stod(need("dual_objective"));
  r.gap = std::stod(need("gap"));
  r.converged = need("converged") == "true";
  r.wall_time_seconds = std::stod(need("wall_time_seconds"));
  r.x = parse_array(need("x"), r.n);
  r.u = parse_array(need("u"), r.n);
  return r;
}

double report_recomputed_gap(const SolutionReport& report, const SymMatrix& sigma) {
  if (sigma.n() != report.n) throw InvalidInput("dimension mismatch");
  const auto comp = detail::solution_gap(solver_from_name(report.solver), report.x,
                                         report.u, sigma.mat(), report.rho,
                                         report.alpha, report.beta);
  return comp.gap;
}

}  // namespace covsel
