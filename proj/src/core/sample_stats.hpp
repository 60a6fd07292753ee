#pragma once

#include <cstdint>

#include "core/moments.hpp"
#include "core/simulate.hpp"

namespace mucogarch {

enum class CovKind { Basic, Truncated, Diag };

// Long-run covariance estimate of the stacked moment data D_i.
struct CovEstimate {
  CovKind kind = CovKind::Basic;
  int M = 0;  // truncation lag (Truncated kind only)
  Mat matrix;
  bool psd_flag = false;  // eigenvalues >= -1e-8, computed honestly
};

// k_hat = (1/n) sum_{i=1}^{n-r} D_i with
//   D_i = [vec(G_i G_i^T); vec(vec(G_i G_i^T) vec(G_{i+h} G_{i+h}^T)^T), h=0..r].
// divisor_n_minus_r switches the divisor to n-r (off by default).
MomentVector empirical_moment_vector(const ReturnsSample& sample, int r,
                                     bool divisor_n_minus_r = false);

// Basic: (1/n) sum_t dev_t dev_t^T over t = 1..n-r.
// Truncated: adds (1/n) sum_{i=1}^{M} sum_{t=1}^{n-r-M} [dev_t dev_{t+i}^T + transpose].
// Diag: diagonal of Basic. dev_t = D_t - k_hat.
CovEstimate long_run_cov(const ReturnsSample& sample, int r, int M, CovKind kind);

// Componentwise standard error of k_hat via a moving-block bootstrap on the
// stacked data D_i (fixed non-overlapping blocks, resampled with replacement).
Vec bootstrap_stderr(const ReturnsSample& sample, int r, int block_len, int n_boot,
                     std::uint64_t seed);

}  // namespace mucogarch
