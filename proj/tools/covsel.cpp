#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "covsel/coordinate.hpp"
#include "covsel/io.hpp"
#include "covsel/model.hpp"
#include "covsel/smooth.hpp"
#include "covsel/spectral.hpp"
#include "covsel/synth.hpp"

namespace {

constexpr int kExitInputError = 2;
constexpr int kExitNotConverged = 3;

struct GenArgs {
  int n = 30;
  double density = 0.05;
  double sigma = 0.15;
  std::uint64_t seed = 1;
  std::string out;
  std::string truth;
};

int run_gen(const GenArgs& a) {
  covsel::SynthInstance inst = covsel::gen_instance(a.n, a.density, a.sigma, a.seed);
  covsel::write_matrix_file(a.out, inst.b_noisy);
  if (!a.truth.empty()) covsel::write_matrix_file(a.truth, inst.a_true);
  return 0;
}

struct SolveArgs {
  std::string input;
  std::optional<double> rho;
  std::optional<long> rho_aic;
  std::optional<long> rho_bic;
  std::string solver = "block-descent";
  double eps = 1e-4;
  std::optional<double> alpha;
  std::optional<double> beta;
  bool auto_bounds = false;
  std::string preset_bounds;
  long max_iter = 0;
  std::string out;
};

covsel::Bounds preset(const std::string& which, const covsel::SymMatrix& sigma) {
  covsel::EigenPair ep = covsel::sym_eig(sigma);
  const double lmin = ep.values[0];
  const double lmax = ep.values[sigma.n() - 1];
  if (!(lmin > 0)) {
    throw covsel::InvalidInput("bound presets need a positive definite input");
  }
  covsel::Bounds b;
  b.alpha = 1.0 / lmax;
  b.beta = which == "half" ? 1.0 / (2.0 * lmin) : 2.0 / lmin;
  if (!(b.alpha < b.beta)) {
    throw covsel::InvalidInput("preset bounds are inconsistent for this input");
  }
  return b;
}

int run_solve(const SolveArgs& a) {
  const int rho_flags = (a.rho ? 1 : 0) + (a.rho_aic ? 1 : 0) + (a.rho_bic ? 1 : 0);
  if (rho_flags != 1) {
    throw covsel::InvalidInput("give exactly one of --rho / --rho-aic / --rho-bic");
  }
  const int bound_flags = ((a.alpha || a.beta) ? 1 : 0) + (a.auto_bounds ? 1 : 0) +
                          (!a.preset_bounds.empty() ? 1 : 0);
  if (bound_flags > 1) {
    throw covsel::InvalidInput("bounds flags are mutually exclusive");
  }
  if ((a.alpha && !a.beta) || (a.beta && !a.alpha)) {
    throw covsel::InvalidInput("--alpha and --beta must be given together");
  }

  covsel::ProblemInstance problem;
  problem.sigma = covsel::read_matrix_file(a.input);
  if (a.rho) problem.rho = *a.rho;
  else if (a.rho_aic)
    problem.rho = covsel::rho_information_criterion(covsel::InfoCriterion::AIC, *a.rho_aic);
  else
    problem.rho = covsel::rho_information_criterion(covsel::InfoCriterion::BIC, *a.rho_bic);

  if (a.alpha) problem.bounds = covsel::Bounds{*a.alpha, *a.beta};
  else if (!a.preset_bounds.empty()) problem.bounds = preset(a.preset_bounds, problem.sigma);
  // --auto-bounds and the default both leave bounds empty

  covsel::SolverConfig config;
  config.solver = covsel::solver_from_name(a.solver);
  config.epsilon = a.eps;
  if (a.max_iter > 0) {
    config.max_iterations = a.max_iter;
  } else {
    config.max_iterations = config.solver == covsel::SolverKind::Smooth ? 200000 : 500;
  }

  const covsel::Solution sol = covsel::solve(problem, config);
  const covsel::SolutionReport report =
      covsel::make_report(config.solver, problem, config, sol);
  if (!a.out.empty()) covsel::write_report(a.out, report);

  std::printf("solver=%s n=%ld rho=%g gap=%g iters=%ld seconds=%.3f\n",
              report.solver.c_str(), report.n, report.rho, report.gap,
              report.iterations, report.wall_time_seconds);
  return sol.converged ? 0 : kExitNotConverged;
}

struct PatternArgs {
  std::string input;
  double threshold = 0;
  std::string format = "dot";
  std::string labels;
  std::string out;
};

int run_pattern(const PatternArgs& a) {
  if (!(a.threshold >= 0)) throw covsel::InvalidInput("threshold must be >= 0");
  const covsel::SolutionReport report = covsel::read_report(a.input);
  const long n = report.n;

  std::vector<std::string> labels;
  if (!a.labels.empty()) {
    std::ifstream in(a.labels);
    if (!in) throw covsel::InvalidInput("cannot open labels file: " + a.labels);
    std::string line;
    while (std::getline(in, line)) labels.push_back(line);
    if (static_cast<long>(labels.size()) < n) {
      throw covsel::InvalidInput("labels file has fewer lines than variables");
    }
  }
  auto label = [&](long i) {
    return labels.empty() ? std::to_string(i + 1) : labels[i];
  };

  std::ofstream out(a.out);
  if (!out) throw covsel::InvalidInput("cannot open for writing: " + a.out);
  if (a.format == "dot") {
    out << "graph G {\n";
    for (long i = 0; i < n; ++i) {
      out << "  " << i + 1 << " [label=\"" << label(i) << "\"];\n";
    }
    for (long i = 0; i < n; ++i) {
      for (long j = i + 1; j < n; ++j) {
        if (std::abs(report.x(i, j)) > a.threshold) {
          out << "  " << i + 1 << " -- " << j + 1 << ";\n";
        }
      }
    }
    out << "}\n";
  } else if (a.format == "edgelist") {
    for (long i = 0; i < n; ++i) {
      for (long j = i + 1; j < n; ++j) {
        if (std::abs(report.x(i, j)) > a.threshold) {
          out << label(i) << ' ' << label(j) << ' '
              << covsel::format_double(report.x(i, j)) << "\n";
        }
      }
    }
  } else {
    throw covsel::InvalidInput("format must be dot or edgelist");
  }
  if (!out) throw covsel::InvalidInput("write failed: " + a.out);
  return 0;
}

struct BenchArgs {
  std::vector<int> sizes{30, 60, 120};
  std::vector<std::string> solvers{"block-descent"};
  double rho = 0.5;
  double sigma = 0.15;
  double density = 0.05;
  std::vector<std::uint64_t> seeds{1};
  double gap_factor = 0.01;
  std::string out;
  std::string trace;
  long max_iter = 200000;
  long max_sweeps = 500;
  int jobs = 1;
};

struct BenchCell {
  int n;
  std::string solver;
  std::uint64_t seed;
};

struct BenchRow {
  BenchCell cell;
  long steps = 0;
  double seconds = 0;
  double gap_initial = 0;
  double gap_final = 0;
  std::string status = "failed";
  std::vector<covsel::TracePoint> trace;
};

double initial_gap(const covsel::ProblemInstance& problem, covsel::SolverKind kind) {
  const Eigen::Index n = problem.sigma.n();
  const Eigen::MatrixXd& sig = problem.sigma.mat();
  switch (kind) {
    case covsel::SolverKind::Smooth: {
      const covsel::Bounds b = problem.effective_bounds();
      const Eigen::MatrixXd x0 = b.beta * Eigen::MatrixXd::Identity(n, n);
      return covsel::detail::primal_min_part(x0, sig, problem.rho) -
             covsel::detail::phi_shifted(sig, b.alpha, b.beta);
    }
    case covsel::SolverKind::BlockDescent: {
      const Eigen::MatrixXd s =
          sig + problem.rho * Eigen::MatrixXd::Identity(n, n);
      Eigen::LLT<Eigen::MatrixXd> llt(s);
      if (llt.info() != Eigen::Success) throw covsel::NotPositiveDefinite();
      Eigen::MatrixXd x = llt.solve(Eigen::MatrixXd::Identity(n, n));
      x = 0.5 * (x + x.transpose());
      return covsel::detail::trace_inner(sig, x) - static_cast<double>(n) +
             problem.rho * covsel::detail::l1_all(x);
    }
    case covsel::SolverKind::BlockAscent: {
      const covsel::Bounds b = problem.effective_bounds();
      covsel::AscentState st = covsel::init_ascent(problem.sigma, problem.rho);
      return covsel::detail::primal_min_part(st.x, sig, problem.rho) -
             covsel::detail::phi_shifted(sig + st.u, b.alpha, b.beta);
    }
  }
  throw covsel::InvalidInput("unknown solver");
}

BenchRow run_bench_cell(const BenchArgs& a, const BenchCell& cell) {
  BenchRow row;
  row.cell = cell;
  try {
    const covsel::SynthInstance inst =
        covsel::gen_instance(cell.n, a.density, a.sigma, cell.seed);
    covsel::ProblemInstance problem;
    problem.sigma = inst.b_noisy;
    problem.rho = a.rho;

    covsel::SolverConfig config;
    config.solver = covsel::solver_from_name(cell.solver);
    row.gap_initial = initial_gap(problem, config.solver);
    config.epsilon = a.gap_factor * row.gap_initial;
    config.max_iterations =
        config.solver == covsel::SolverKind::Smooth ? a.max_iter : a.max_sweeps;

    covsel::TraceCallback cb = [&row](const covsel::TracePoint& t) {
      row.trace.push_back(t);
    };
    const covsel::Solution sol = covsel::solve(problem, config, cb);
    row.steps = sol.iterations;
    row.seconds = sol.wall_time_seconds;
    row.gap_final = sol.gap;
    row.status = sol.converged ? "ok" : "capped";
  } catch (const std::exception& e) {
    row.status = "failed";
    std::fprintf(stderr, "bench cell n=%d solver=%s seed=%llu failed: %s\n",
                 cell.n, cell.solver.c_str(),
                 static_cast<unsigned long long>(cell.seed), e.what());
  }
  return row;
}

int run_bench(const BenchArgs& a) {
  if (a.sizes.empty() || a.solvers.empty() || a.seeds.empty()) {
    throw covsel::InvalidInput("sizes, solvers and seeds must be nonempty");
  }
  for (int n : a.sizes) {
    if (n < 2) throw covsel::InvalidInput("all sizes must be >= 2");
  }
  if (!(a.gap_factor > 0) || !(a.gap_factor < 1)) {
    throw covsel::InvalidInput("gap factor must be in (0, 1)");
  }
  for (const auto& s : a.solvers) covsel::solver_from_name(s);

  std::vector<BenchCell> cells;
  for (int n : a.sizes) {
    for (const auto& s : a.solvers) {
      for (std::uint64_t seed : a.seeds) cells.push_back(BenchCell{n, s, seed});
    }
  }

  std::vector<BenchRow> rows(cells.size());
  const int jobs = std::max(1, a.jobs);
  if (jobs == 1) {
    for (size_t i = 0; i < cells.size(); ++i) rows[i] = run_bench_cell(a, cells[i]);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const size_t i = next.fetch_add(1);
          if (i >= cells.size()) return;
          rows[i] = run_bench_cell(a, cells[i]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::ofstream out(a.out);
  if (!out) throw covsel::InvalidInput("cannot open for writing: " + a.out);
  out << "n,solver,seed,iterations_or_sweeps,seconds,gap_initial,gap_final,status\n";
  for (const auto& r : rows) {
    out << r.cell.n << ',' << r.cell.solver << ',' << r.cell.seed << ','
        << r.steps << ',' << covsel::format_double(r.seconds) << ','
        << covsel::format_double(r.gap_initial) << ','
        << covsel::format_double(r.gap_final) << ',' << r.status << "\n";
  }
  if (!a.trace.empty()) {
    std::ofstream tr(a.trace);
    if (!tr) throw covsel::InvalidInput("cannot open for writing: " + a.trace);
    tr << "n,solver,seed,iter,primal,dual,gap,elapsed_seconds\n";
    for (const auto& r : rows) {
      for (const auto& t : r.trace) {
        tr << r.cell.n << ',' << r.cell.solver << ',' << r.cell.seed << ','
           << t.k << ',' << covsel::format_double(t.primal) << ','
           << covsel::format_double(t.dual) << ',' << covsel::format_double(t.gap)
           << ',' << covsel::format_double(t.elapsed_seconds) << "\n";
      }
    }
  }

  const bool all_failed = std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) {
    return r.status == "failed";
  });
  return all_failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse inverse covariance estimation by penalized maximum likelihood"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* cgen = app.add_subcommand("gen", "Generate a synthetic instance");
  cgen->add_option("--n", gen.n, "dimension (>= 2)")->required();
  cgen->add_option("--density", gen.density, "off-diagonal fill in (0,1)");
  cgen->add_option("--sigma", gen.sigma, "noise level (>= 0)");
  cgen->add_option("--seed", gen.seed, "random seed");
  cgen->add_option("--out", gen.out, "covariance output path")->required();
  cgen->add_option("--truth", gen.truth, "ground-truth precision output path");

  SolveArgs solve;
  auto* csolve = app.add_subcommand("solve", "Solve a covariance-selection instance");
  csolve->add_option("--input", solve.input, "covariance matrix file")->required();
  csolve->add_option("--rho", solve.rho, "penalty level");
  csolve->add_option("--rho-aic", solve.rho_aic, "AIC penalty for sample size N");
  csolve->add_option("--rho-bic", solve.rho_bic, "BIC penalty for sample size N");
  csolve->add_option("--solver", solve.solver, "smooth|block-descent|block-ascent")
      ->check(CLI::IsMember({"smooth", "block-descent", "block-ascent"}));
  csolve->add_option("--eps", solve.eps, "target duality gap");
  csolve->add_option("--alpha", solve.alpha, "explicit lower eigenvalue bound");
  csolve->add_option("--beta", solve.beta, "explicit upper eigenvalue bound");
  csolve->add_flag("--auto-bounds", solve.auto_bounds, "derive bounds from (sigma, rho)");
  csolve->add_option("--preset-bounds", solve.preset_bounds,
                     "half: beta=1/(2 lmin); two: beta=2/lmin; alpha=1/lmax")
      ->check(CLI::IsMember({"half", "two"}));
  csolve->add_option("--max-iter", solve.max_iter, "iteration/sweep cap");
  csolve->add_option("--out", solve.out, "report output path");

  PatternArgs pattern;
  auto* cpattern = app.add_subcommand("pattern", "Export the sparsity graph of a report");
  cpattern->add_option("--input", pattern.input, "solve report")->required();
  cpattern->add_option("--threshold", pattern.threshold, "|x_ij| cutoff")->required();
  cpattern->add_option("--format", pattern.format, "dot|edgelist")
      ->check(CLI::IsMember({"dot", "edgelist"}));
  cpattern->add_option("--labels", pattern.labels, "node labels, one per line");
  cpattern->add_option("--out", pattern.out, "graph output path")->required();

  BenchArgs bench;
  auto* cbench = app.add_subcommand("bench", "Timing harness over sizes and solvers");
  cbench->add_option("--sizes", bench.sizes, "problem sizes")->delimiter(',');
  cbench->add_option("--solvers", bench.solvers, "solvers to run")->delimiter(',');
  cbench->add_option("--rho", bench.rho, "penalty level");
  cbench->add_option("--sigma", bench.sigma, "instance noise level");
  cbench->add_option("--density", bench.density, "instance density");
  cbench->add_option("--seeds", bench.seeds, "instance seeds")->delimiter(',');
  cbench->add_option("--gap-factor", bench.gap_factor, "stop at factor * initial gap");
  cbench->add_option("--out", bench.out, "CSV output path")->required();
  cbench->add_option("--trace", bench.trace, "per-iteration trace CSV path");
  cbench->add_option("--max-iter", bench.max_iter, "smooth iteration cap");
  cbench->add_option("--max-sweeps", bench.max_sweeps, "coordinate sweep cap");
  cbench->add_option("--jobs", bench.jobs, "parallel worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cgen->parsed()) return run_gen(gen);
    if (csolve->parsed()) return run_solve(solve);
    if (cpattern->parsed()) return run_pattern(pattern);
    if (cbench->parsed()) return run_bench(bench);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInputError;
  }
  return kExitInputError;
}
