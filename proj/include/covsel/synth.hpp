#pragma once

#include <cstdint>

#include "covsel/types.hpp"

namespace covsel {

/// A generated test instance: sparse ground-truth precision matrix and the
/// noisy covariance derived from it.
struct SynthInstance {
  SymMatrix a_true;
  SymMatrix b_noisy;
  double sigma_noise = 0;
  std::uint64_t seed = 0;
  double density = 0;
};

/// Unit diagonal with round(density * n(n-1)/2) symmetric off-diagonal
/// entries set to +-1; resampled from the seeded stream until positive
/// definite (lambda_min > 1e-3), dropping one entry per exhausted round.
SymMatrix gen_sparse_precision(int n, double density, std::uint64_t seed);

/// B = A^-1 + sigma_noise * V with V symmetric iid uniform on [-1, 1];
/// eigenvalues shifted up when lambda_min(B) < 1e-2.
SymMatrix gen_noisy_covariance(const SymMatrix& a, double sigma_noise,
                               std::uint64_t seed);

SynthInstance gen_instance(int n, double density, double sigma_noise,
                           std::uint64_t seed);

struct RecoveryMetrics {
  double tpr = 0;
  double fpr = 0;
  double f1 = 0;
};

/// Off-diagonal support recovery: positives are |a_true_ij| > 0, predicted
/// positives |x_est_ij| > threshold. Empty classes follow the 0/0 -> perfect
/// convention (tpr 1 without positives, fpr 0 without negatives).
RecoveryMetrics recovery_metrics(const SymMatrix& a_true, const SymMatrix& x_est,
                                 double threshold);

}  // namespace covsel
