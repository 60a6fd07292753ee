#include "core/recover.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "core/errors.hpp"

namespace mucogarch {

namespace {

constexpr double kCondLimit = 1e10;
constexpr double kStripMargin = 1e-10;
constexpr double kAsymGap = 1e-8;

Mat sym_restrict_or(const Mat& M, ErrorCode on_fail) {
  try {
    return sym_restrict(M);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SubspaceNotPreserved) fail(on_fail, e.what());
    throw;
  }
}

double condition_2norm(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace

Mat recover_expB(const Mat& acov1, const Mat& acov2) {
  if (acov1.rows() != acov1.cols() || acov2.rows() != acov2.cols() ||
      acov1.rows() != acov2.rows()) {
    fail(ErrorCode::ShapeError, "recover_expB: autocovariance blocks must be square, same size");
  }
  const Mat M1 = sym_restrict_or(acov1, ErrorCode::NotSymPreserving);
  const Mat M2 = sym_restrict_or(acov2, ErrorCode::NotSymPreserving);
  const double cond = condition_2norm(M1);
  if (!(cond < kCondLimit)) {
    fail(ErrorCode::SingularAcov,
         "recover_expB: lag-1 autocovariance too ill-conditioned on the symmetric subspace "
         "(cond = " +
             std::to_string(cond) + ")");
  }
  // X = M2 * M1^{-1} via a transposed solve.
  return M1.transpose().partialPivLu().solve(M2.transpose()).transpose();
}

Mat log_to_calB(const Mat& expB_vech, double delta) {
  if (expB_vech.rows() != expB_vech.cols()) {
    fail(ErrorCode::ShapeError, "log_to_calB: operator must be square");
  }
  if (!(delta > 0.0)) fail(ErrorCode::InvalidConfig, "log_to_calB: delta must be positive");
  Eigen::EigenSolver<Mat> es(expB_vech);
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::InternalError, "log_to_calB: eigen decomposition failed");
  }
  for (Eigen::Index i = 0; i < expB_vech.rows(); ++i) {
    const std::complex<double> mu = es.eigenvalues()(i);
    const double mag = std::abs(mu);
    if (std::abs(mu.imag()) <= 1e-12 * std::max(1.0, mag) && mu.real() <= 0.0) {
      fail(ErrorCode::LogmBranchError,
           "log_to_calB: eigenvalue on the closed negative real axis");
    }
    // Principal log lands at Im = arg(mu); reject within margin of the strip
    // edge |Im| = pi.
    if (std::numbers::pi - std::abs(std::arg(mu)) < kStripMargin) {
      fail(ErrorCode::StripViolation,
           "log_to_calB: log eigenvalue within " + std::to_string(kStripMargin) +
               " of the strip edge |Im| = pi");
    }
  }
  return logm(expB_vech) / delta;
}

std::pair<Mat, Mat> recover_AB_from_calB(const Mat& calB, double sigma_L) {
  const Eigen::Index n = calB.rows();
  if (calB.cols() != n) fail(ErrorCode::ShapeError, "recover_AB_from_calB: operator not square");
  const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n) fail(ErrorCode::ShapeError, "recover_AB_from_calB: side not a perfect square");
  if (d < 2) fail(ErrorCode::ShapeError, "recover_AB_from_calB: needs dimension >= 2");
  if (!(sigma_L > 0.0)) {
    fail(ErrorCode::InvalidConfig, "recover_AB_from_calB: sigma_L must be positive");
  }
  const auto blk = [&](Eigen::Index i, Eigen::Index j) { return calB.block(i * d, j * d, d, d); };

  // Block (i,j) = B_ij I + delta_ij B + sigma_L A_ij A, so block (0,1) is
  // sigma_L A_01 A off its diagonal; entry (0,1) of it is sigma_L A_01^2.
  const Mat b01 = blk(0, 1);
  const double sq = b01(0, 1) / sigma_L;
  if (!(sq > 0.0)) {
    fail(ErrorCode::NegativeSquare, "recover_AB_from_calB: block entry for A_12^2 not positive");
  }
  Mat A = Mat::Zero(d, d);
  A(0, 1) = std::sqrt(sq);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i != j) A(i, j) = b01(i, j) / (sigma_L * A(0, 1));
    }
  }
  if (std::abs(A(0, 1) - A(1, 0)) < kAsymGap) {
    fail(ErrorCode::DegenerateAsymmetry,
         "recover_AB_from_calB: |A_12 - A_21| below identifiability gap");
  }
  // Diagonal of A from the antisymmetric part of each diagonal block;
  // B_ii I + B is symmetric, so block(k,k)(0,1) - block(k,k)(1,0)
  // = sigma_L A_kk (A_12 - A_21).
  const double denom = sigma_L * (A(0, 1) - A(1, 0));
  for (Eigen::Index k = 0; k < d; ++k) {
    const Mat bk = blk(k, k);
    A(k, k) = (bk(0, 1) - bk(1, 0)) / denom;
  }
  // Remainder has blocks B_ij I + delta_ij B; block (0,0) entry (0,0) is 2 B_00.
  const Mat rem = calB - sigma_L * kron(A, A);
  const Mat r00 = rem.block(0, 0, d, d);
  const double b00 = r00(0, 0) / 2.0;
  Mat B = r00 - b00 * Mat::Identity(d, d);
  return {std::move(A), std::move(B)};
}

std::pair<Mat, Mat> recover_AB_from_vech(const Mat& calB_vech, double sigma_L) {
  if (calB_vech.rows() != 3 || calB_vech.cols() != 3) {
    fail(ErrorCode::ShapeError, "recover_AB_from_vech: expects the 3x3 (d = 2) operator");
  }
  if (!(sigma_L > 0.0)) {
    fail(ErrorCode::InvalidConfig, "recover_AB_from_vech: sigma_L must be positive");
  }
  const Mat& M = calB_vech;
  const double sq = M(0, 2) / sigma_L;
  if (!(sq > 0.0)) {
    fail(ErrorCode::NegativeSquare, "recover_AB_from_vech: entry for A_12^2 not positive");
  }
  const double a12 = std::sqrt(sq);
  // diff = A_11 - A_22 and the product A_12 A_21 follow from linear
  // combinations of the vech operator; with B symmetric the remaining
  // asymmetries isolate A_11.
  const double diff = (M(0, 1) - 2.0 * M(1, 2)) / (2.0 * sigma_L * a12);
  const double prod = (M(1, 1) - 0.5 * (M(0, 0) + M(2, 2))) / sigma_L + 0.5 * diff * diff;
  const double a21 = prod / a12;
  if (std::abs(a12 - a21) < kAsymGap) {
    fail(ErrorCode::DegenerateAsymmetry,
         "recover_AB_from_vech: |A_12 - A_21| below identifiability gap");
  }
  const double a11 = (M(0, 1) - 2.0 * M(1, 0)) / (2.0 * sigma_L * (a12 - a21));
  const double a22 = a11 - diff;
  const double b12 = M(1, 2) - sigma_L * a12 * a22;
  const double b11 = (M(0, 0) - sigma_L * a11 * a11) / 2.0;
  const double b22 = (M(2, 2) - sigma_L * a22 * a22) / 2.0;
  Mat A(2, 2), B(2, 2);
  A << a11, a12, a21, a22;
  B << b11, b12, b12, b22;
  return {std::move(A), std::move(B)};
}

Mat recover_C(const Vec& mean_sq, const Mat& A, const Mat& B, double sigma_L, double sigma_W,
              double delta) {
  const Eigen::Index d = A.rows();
  if (B.rows() != d || B.cols() != d || A.cols() != d || mean_sq.size() != d * d) {
    fail(ErrorCode::ShapeError, "recover_C: dimension mismatch");
  }
  if (!(delta > 0.0) || !(sigma_L + sigma_W > 0.0)) {
    fail(ErrorCode::InvalidConfig, "recover_C: needs delta > 0 and sigma_L + sigma_W > 0");
  }
  if (max_real_eig(B) >= 0.0) {
    fail(ErrorCode::UnstableB, "recover_C: B must have spectrum in the open left half-plane");
  }
  const Mat I = Mat::Identity(d, d);
  const Mat bsum = kron(B, I) + kron(I, B);
  MucogarchParams p;
  p.d = static_cast<int>(d);
  p.A = A;
  p.B = B;
  p.C = I;  // placeholder, cal_B only uses A and B
  const Mat calB = cal_B(p, sigma_L);
  const Vec rhs = calB * mean_sq;
  const Vec vc = bsum.partialPivLu().solve(rhs) / ((sigma_L + sigma_W) * delta);
  return symmetrize(unvec(vc));
}

Mat identify_from_AXA(const std::function<Mat(const Mat&)>& action, int d) {
  if (d < 1) fail(ErrorCode::ShapeError, "identify_from_AXA: needs d >= 1");
  // Off-diagonal symmetric basis element E_jk + E_kj; only queried with j != k.
  const auto basis = [&](int j, int k) {
    Mat E = Mat::Zero(d, d);
    E(j, k) = 1.0;
    E(k, j) = 1.0;
    return E;
  };
  std::vector<Mat> Wdiag(static_cast<size_t>(d));
  double scale = 0.0;
  for (int j = 0; j < d; ++j) {
    Mat E = Mat::Zero(d, d);
    E(j, j) = 1.0;
    Wdiag[static_cast<size_t>(j)] = action(E);
    if (Wdiag[static_cast<size_t>(j)].rows() != d || Wdiag[static_cast<size_t>(j)].cols() != d) {
      fail(ErrorCode::ShapeError, "identify_from_AXA: action image has wrong shape");
    }
    scale = std::max(scale, std::abs(Wdiag[static_cast<size_t>(j)](0, 0)));
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  int jstar = -1;
  for (int j = 0; j < d; ++j) {
    if (Wdiag[static_cast<size_t>(j)](0, 0) > tol) {
      jstar = j;
      break;
    }
  }
  if (jstar < 0) {
    fail(ErrorCode::HypothesisViolated,
         "identify_from_AXA: first row of A is zero, columns not identifiable");
  }
  // W^{(jj)} = a_j a_j^T and W^{(jk)} = a_j a_k^T + a_k a_j^T for columns a_j;
  // anchor on the first column with a nonzero leading entry, taken positive.
  Mat A = Mat::Zero(d, d);
  const Mat& Ws = Wdiag[static_cast<size_t>(jstar)];
  A(0, jstar) = std::sqrt(Ws(0, 0));
  for (int m = 0; m < d; ++m) A(m, jstar) = Ws(0, m) / A(0, jstar);
  for (int k = 0; k < d; ++k) {
    if (k == jstar) continue;
    const Mat Wk = action(basis(jstar, k));
    A(0, k) = Wk(0, 0) / (2.0 * A(0, jstar));
    for (int m = 1; m < d; ++m) {
      A(m, k) = (Wk(0, m) - A(0, k) * A(m, jstar)) / A(0, jstar);
    }
  }
  return A;
}

MomentInitResult moment_init(const MomentVector& k_hat, const LevySpec& levy, double delta) {
  if (k_hat.d != 2) {
    fail(ErrorCode::ShapeError, "moment_init: closed-form start only defined for d = 2");
  }
  if (k_hat.r < 2) {
    fail(ErrorCode::InsufficientData, "moment_init: needs lag blocks up to r >= 2");
  }
  if (k_hat.values.size() != 4 + (static_cast<Eigen::Index>(k_hat.r) + 1) * 16) {
    fail(ErrorCode::ShapeError, "moment_init: moment vector length inconsistent with d, r");
  }
  MomentInitResult res;
  const Vec m1 = k_hat.mean_sq();
  const Mat mm = m1 * m1.transpose();
  // Lag block h stores E[X_1 X_{1+h}^T] = cov(X_{1+h}, X_1)^T + m1 m1^T.
  const Mat acov1 = (k_hat.lag_block(1) - mm).transpose();
  const Mat acov2 = (k_hat.lag_block(2) - mm).transpose();
  try {
    const Mat X = recover_expB(acov1, acov2);
    const Mat Bv = log_to_calB(X, delta);
    auto [A, Braw] = recover_AB_from_vech(Bv, levy.sigma_L);
    const double asymB = (Braw - Braw.transpose()).norm();
    const Mat B = symmetrize(Braw);
    Mat Craw(2, 2);
    {
      // recover_C already symmetrizes; recompute the raw solve to report how
      // far from symmetric the unconstrained solution was.
      MucogarchParams p;
      p.d = 2;
      p.A = A;
      p.B = B;
      p.C = Mat::Identity(2, 2);
      if (max_real_eig(B) >= 0.0) {
        fail(ErrorCode::UnstableB, "moment_init: recovered B is not stable");
      }
      const Mat I2 = Mat::Identity(2, 2);
      const Mat bsum = kron(B, I2) + kron(I2, B);
      const Vec vc =
          bsum.partialPivLu().solve(cal_B(p, levy.sigma_L) * m1) / ((levy.sigma_L + levy.sigma_W) * delta);
      Craw = unvec(vc);
    }
    const Mat C = symmetrize(Craw);

    res.detail.A = A;
    res.detail.B = B;
    res.detail.C = C;
    MucogarchParams rec;
    rec.d = 2;
    rec.A = A;
    rec.B = B;
    rec.C = C;
    res.detail.calB = cal_B(rec, levy.sigma_L);
    const Mat calB_vech = sym_restrict(res.detail.calB);
    res.detail.residual_calB = (calB_vech - Bv).norm() + asymB;
    res.detail.residual_expB = (expm(calB_vech * delta) - X).norm();
    res.detail.residual_C = (Craw - Craw.transpose()).norm();
    res.detail.feasible = A(0, 1) > 0.0 && std::abs(A(0, 1) - A(1, 0)) >= kAsymGap;

    Eigen::SelfAdjointEigenSolver<Mat> es(C);
    res.detail.C_pd = es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0;
    if (!res.detail.C_pd) {
      res.ok = false;
      res.error = ErrorCode::InfeasibleInit;
      res.message = "moment_init: recovered C is not positive definite";
      return res;
    }
    res.theta = matrices_to_theta(rec);
    res.ok = true;
    res.error = ErrorCode::Ok;
  } catch (const Error& e) {
    res.ok = false;
    res.error = e.code();
    res.message = e.what();
  }
  return res;
}

}  // namespace mucogarch
