#include "core/sample_stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/rng.hpp"

namespace mucogarch {

namespace {

constexpr std::uint32_t kStreamBootstrap = 4;

// Rows: X_i = vec(G_i G_i^T), column-major entry (a + d*b) = G_i(a) G_i(b).
Mat squared_return_rows(const ReturnsSample& sample) {
  int d = sample.d;
  Eigen::Index n = sample.returns.rows();
  Mat X(n, d * d);
  for (Eigen::Index t = 0; t < n; ++t)
    for (int b = 0; b < d; ++b)
      for (int a = 0; a < d; ++a) X(t, a + d * b) = sample.returns(t, a) * sample.returns(t, b);
  return X;
}

Eigen::Index stacked_dim(int d, int r) {
  Eigen::Index n2 = static_cast<Eigen::Index>(d) * d;
  return n2 + (r + 1) * n2 * n2;
}

using RowRef = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

// D_t as one row of the stacked data matrix, t = 0..n-r-1.
void fill_stacked_row(const Mat& X, int r, Eigen::Index t, RowRef row) {
  Eigen::Index n2 = X.cols();
  row.segment(0, n2) = X.row(t);
  for (int h = 0; h <= r; ++h) {
    // vec(X_t X_{t+h}^T) entry (a + n2*b) = X_t(a) X_{t+h}(b)
    for (Eigen::Index b = 0; b < n2; ++b)
      for (Eigen::Index a = 0; a < n2; ++a)
        row(n2 + h * n2 * n2 + a + n2 * b) = X(t, a) * X(t + h, b);
  }
}

}  // namespace

MomentVector empirical_moment_vector(const ReturnsSample& sample, int r, bool divisor_n_minus_r) {
  Eigen::Index n = sample.returns.rows();
  if (r < 0) fail(ErrorCode::InvalidConfig, "empirical_moment_vector: r must be >= 0");
  if (n <= r) fail(ErrorCode::InsufficientData, "empirical_moment_vector: need n > r");
  int d = sample.d;
  Eigen::Index n2 = static_cast<Eigen::Index>(d) * d;
  Eigen::Index m = n - r;
  Mat X = squared_return_rows(sample);

  Vec mean_acc = Vec::Zero(n2);
  std::vector<Mat> lag_acc(r + 1, Mat::Zero(n2, n2));
  for (Eigen::Index t = 0; t < m; ++t) {
    mean_acc += X.row(t).transpose();
    for (int h = 0; h <= r; ++h)
      lag_acc[h].noalias() += X.row(t).transpose() * X.row(t + h);
  }
  double divisor = divisor_n_minus_r ? static_cast<double>(m) : static_cast<double>(n);

  MomentVector k;
  k.d = d;
  k.r = r;
  k.delta = sample.delta;
  k.values.resize(stacked_dim(d, r));
  k.values.segment(0, n2) = mean_acc / divisor;
  for (int h = 0; h <= r; ++h)
    k.values.segment(n2 + h * n2 * n2, n2 * n2) = vec(lag_acc[h]) / divisor;
  return k;
}

CovEstimate long_run_cov(const ReturnsSample& sample, int r, int M, CovKind kind) {
  Eigen::Index n = sample.returns.rows();
  if (r < 0 || M < 0) fail(ErrorCode::InvalidConfig, "long_run_cov: r, M must be >= 0");
  Eigen::Index need = (kind == CovKind::Truncated) ? r + M : r;
  if (n <= need) fail(ErrorCode::InsufficientData, "long_run_cov: sample too short for r, M");

  MomentVector k_hat = empirical_moment_vector(sample, r);
  Mat X = squared_return_rows(sample);
  Eigen::Index m = n - r;
  Eigen::Index dim = stacked_dim(sample.d, r);

  Mat dev(m, dim);
  Eigen::RowVectorXd center = k_hat.values.transpose();
  for (Eigen::Index t = 0; t < m; ++t) {
    fill_stacked_row(X, r, t, dev.row(t));
    dev.row(t) -= center;
  }

  Mat S = dev.transpose() * dev / static_cast<double>(n);
  if (kind == CovKind::Truncated && M > 0) {
    Eigen::Index mt = m - M;
    for (int i = 1; i <= M; ++i) {
      Mat cross =
          dev.topRows(mt).transpose() * dev.middleRows(i, mt) / static_cast<double>(n);
      S += cross + cross.transpose();
    }
  }
  CovEstimate out;
  out.kind = kind;
  out.M = (kind == CovKind::Truncated) ? M : 0;
  if (kind == CovKind::Diag) {
    out.matrix = S.diagonal().asDiagonal();
  } else {
    out.matrix = symmetrize(S);
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(out.matrix, Eigen::EigenvaluesOnly);
  out.psd_flag = es.eigenvalues().minCoeff() >= -1e-8;
  return out;
}

Vec bootstrap_stderr(const ReturnsSample& sample, int r, int block_len, int n_boot,
                     std::uint64_t seed) {
  Eigen::Index n = sample.returns.rows();
  if (block_len < 1 || n_boot < 2) fail(ErrorCode::InvalidConfig, "bootstrap_stderr: bad config");
  if (n <= r) fail(ErrorCode::InsufficientData, "bootstrap_stderr: need n > r");
  Eigen::Index m = n - r;
  Eigen::Index nb = m / block_len;
  if (nb < 2) fail(ErrorCode::InsufficientData, "bootstrap_stderr: too few blocks");

  Mat X = squared_return_rows(sample);
  Eigen::Index dim = stacked_dim(sample.d, r);
  // Per-block means of D_t over fixed non-overlapping blocks (tail dropped).
  Mat block_means = Mat::Zero(nb, dim);
  Eigen::RowVectorXd row(dim);
  for (Eigen::Index b = 0; b < nb; ++b) {
    for (Eigen::Index j = 0; j < block_len; ++j) {
      fill_stacked_row(X, r, b * block_len + j, row);
      block_means.row(b) += row;
    }
    block_means.row(b) /= static_cast<double>(block_len);
  }

  PhiloxRng rng(seed, 0, kStreamBootstrap);
  Mat boots(n_boot, dim);
  for (int it = 0; it < n_boot; ++it) {
    Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(dim);
    for (Eigen::Index b = 0; b < nb; ++b) {
      Eigen::Index idx = std::min<Eigen::Index>(static_cast<Eigen::Index>(rng.uniform() * nb), nb - 1);
      acc += block_means.row(idx);
    }
    boots.row(it) = acc / static_cast<double>(nb);
  }
  // Bootstrap se of mean(D); k_hat = (m/n) * mean(D), so rescale.
  Eigen::RowVectorXd mean_boot = boots.colwise().mean();
  Vec se(dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    double ss = (boots.col(j).array() - mean_boot(j)).square().sum() / (n_boot - 1);
    se(j) = std::sqrt(ss) * static_cast<double>(m) / static_cast<double>(n);
  }
  return se;
}

}  // namespace mucogarch
