#include "covsel/synth.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "covsel/spectral.hpp"

namespace covsel {

namespace {

// Thin deterministic wrapper; draws do not depend on libstdc++ distribution
// internals, so streams are reproducible across toolchains.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double u01() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double sym_unit() { return 2.0 * u01() - 1.0; }
  bool coin() { return (eng() & 1u) != 0; }
  std::uint64_t bounded(std::uint64_t m) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng()) * m) >> 64);
  }
};

double min_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigenFailure("eigenvalue solve failed");
  return es.eigenvalues()[0];
}

}  // namespace

SymMatrix gen_sparse_precision(int n, double density, std::uint64_t seed) {
  if (n < 2) throw InvalidInput("n must be >= 2");
  if (!(density > 0) || !(density < 1)) throw InvalidInput("density must be in (0, 1)");

  const long pairs = static_cast<long>(n) * (n - 1) / 2;
  long k = std::lround(density * static_cast<double>(pairs));
  Rng rng(seed);

  std::vector<std::pair<int, int>> all;
  all.reserve(pairs);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) all.emplace_back(i, j);
  }

  // Unit off-diagonal magnitudes cannot stay positive definite: any lone
  // +-1 edge gives a singular 2x2 principal block, so lambda_min <= 0 by
  // interlacing. The pattern and signs are kept and the common magnitude is
  // scaled to the largest value that preserves lambda_min > 1e-3.
  for (; k >= 0; --k) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
      // partial Fisher-Yates: first k slots become the chosen positions
      std::vector<int> idx(pairs);
      std::iota(idx.begin(), idx.end(), 0);
      for (long t = 0; t < k; ++t) {
        const long r = t + static_cast<long>(rng.bounded(pairs - t));
        std::swap(idx[t], idx[r]);
        const auto [i, j] = all[idx[t]];
        const double v = rng.coin() ? 1.0 : -1.0;
        e(i, j) = v;
        e(j, i) = v;
      }
      double scale = 1.0;
      if (k > 0) {
        const double lmin_e = min_eigenvalue(e);
        if (lmin_e < 0) {
          scale = std::min(1.0, 0.9 * (1.0 - 1e-3) / -lmin_e);
        }
      }
      Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) + scale * e;
      if (min_eigenvalue(a) > 1e-3) return SymMatrix(a);
    }
  }
  // k = 0 is the identity, which always passes above
  throw Error("unreachable: identity failed positive definiteness");
}

SymMatrix gen_noisy_covariance(const SymMatrix& a, double sigma_noise,
                               std::uint64_t seed) {
  if (!(sigma_noise >= 0)) throw InvalidInput("sigma_noise must be >= 0");
  const Eigen::Index n = a.n();
  Eigen::LLT<Eigen::MatrixXd> llt(a.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("ground-truth precision must be positive definite");
  }
  Eigen::MatrixXd b = llt.solve(Eigen::MatrixXd::Identity(n, n));
  b = 0.5 * (b + b.transpose());

  Rng rng(seed);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = rng.sym_unit();
      b(i, j) += sigma_noise * v;
      if (j != i) b(j, i) += sigma_noise * v;
    }
  }

  const double delta = 1e-2;
  const double lmin = min_eigenvalue(b);
  if (lmin < delta) {
    b += (delta - lmin) * Eigen::MatrixXd::Identity(n, n);
  }
  return SymMatrix(b);
}

SynthInstance gen_instance(int n, double density, double sigma_noise,
                           std::uint64_t seed) {
  SynthInstance inst;
  inst.density = density;
  inst.sigma_noise = sigma_noise;
  inst.seed = seed;
  inst.a_true = gen_sparse_precision(n, density, seed);
  // decorrelated stream for the noise draw
  const std::uint64_t noise_seed =
      seed * 6364136223846793005ull + 1442695040888963407ull;
  inst.b_noisy = gen_noisy_covariance(inst.a_true, sigma_noise, noise_seed);
  return inst;
}

RecoveryMetrics recovery_metrics(const SymMatrix& a_true, const SymMatrix& x_est,
                                 double threshold) {
  if (a_true.n() != x_est.n()) throw InvalidInput("dimension mismatch");
  if (!(threshold >= 0)) throw InvalidInput("threshold must be >= 0");
  long tp = 0, fp = 0, fn = 0, tn = 0;
  const Eigen::Index n = a_true.n();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const bool pos = std::abs(a_true(i, j)) > 0;
      const bool pred = std::abs(x_est(i, j)) > threshold;
      if (pos && pred) ++tp;
      else if (!pos && pred) ++fp;
      else if (pos && !pred) ++fn;
      else ++tn;
    }
  }
  RecoveryMetrics m;
  m.tpr = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 1.0;
  m.fpr = (fp + tn) > 0 ? static_cast<double>(fp) / static_cast<double>(fp + tn) : 0.0;
  const long den = 2 * tp + fp + fn;
  m.f1 = den > 0 ? 2.0 * static_cast<double>(tp) / static_cast<double>(den) : 1.0;
  return m;
}

}  // namespace covsel
