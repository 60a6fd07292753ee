#include "core/levy_model.hpp"

#include <cmath>

namespace mucogarch {

void validate_params(const MucogarchParams& params) {
  int d = params.d;
  if (d <= 0 || params.A.rows() != d || params.A.cols() != d || params.B.rows() != d ||
      params.B.cols() != d || params.C.rows() != d || params.C.cols() != d)
    fail(ErrorCode::DimensionMismatch, "params: matrices must be d x d");
  double scale = std::max(1.0, params.C.cwiseAbs().maxCoeff());
  if ((params.C - params.C.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    fail(ErrorCode::NonSymmetricInput, "params: C not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(params.C));
  if (es.eigenvalues().minCoeff() <= 0.0)
    fail(ErrorCode::ConstraintViolation, "params: C not positive definite");
}

MucogarchParams theta_to_matrices(const Vec& theta) {
  if (theta.size() != 10) fail(ErrorCode::ShapeError, "theta: expected 10 coordinates");
  if (theta(1) <= 0.0) fail(ErrorCode::ConstraintViolation, "theta: coordinate 2 must be > 0");
  MucogarchParams p;
  p.d = 2;
  p.A = Mat(2, 2);
  p.A << theta(0), theta(1), theta(2), theta(3);
  p.B = Mat(2, 2);
  p.B << theta(4), theta(5), theta(5), theta(6);
  p.C = Mat(2, 2);
  p.C << theta(7), theta(8), theta(8), theta(9);
  Eigen::SelfAdjointEigenSolver<Mat> es(p.C);
  if (es.eigenvalues().minCoeff() <= 0.0)
    fail(ErrorCode::ConstraintViolation, "theta: C part not positive definite");
  return p;
}

Vec matrices_to_theta(const MucogarchParams& params, double tol) {
  if (params.d != 2) fail(ErrorCode::ShapeError, "matrices_to_theta: requires d = 2");
  validate_params(params);
  double bscale = std::max(1.0, params.B.cwiseAbs().maxCoeff());
  if (std::abs(params.B(0, 1) - params.B(1, 0)) > tol * bscale)
    fail(ErrorCode::ConstraintViolation, "matrices_to_theta: B not symmetric");
  Vec t(10);
  t << params.A(0, 0), params.A(0, 1), params.A(1, 0), params.A(1, 1), params.B(0, 0),
      params.B(0, 1), params.B(1, 1), params.C(0, 0), params.C(0, 1), params.C(1, 1);
  return t;
}

LevySpec levy_constants(double cpp_rate, const Mat& jump_cov, double sigma_W) {
  if (jump_cov.rows() != jump_cov.cols() || jump_cov.rows() < 1)
    fail(ErrorCode::ShapeError, "levy_constants: jump_cov must be square");
  double s = jump_cov(0, 0);
  Mat dev = jump_cov - s * Mat::Identity(jump_cov.rows(), jump_cov.cols());
  if (dev.cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, std::abs(s)))
    fail(ErrorCode::NonIsotropicJumps, "levy_constants: jump_cov must be s * I");
  return make_levy(cpp_rate, s, sigma_W);
}

LevySpec make_levy(double cpp_rate, double jump_scale, double sigma_W) {
  if (cpp_rate <= 0.0 || jump_scale <= 0.0 || sigma_W < 0.0)
    fail(ErrorCode::InvalidConfig, "levy: need cpp_rate > 0, jump_scale > 0, sigma_W >= 0");
  LevySpec l;
  l.sigma_W = sigma_W;
  l.cpp_rate = cpp_rate;
  l.jump_scale = jump_scale;
  l.sigma_L = cpp_rate * jump_scale;
  l.rho_L = cpp_rate * jump_scale * jump_scale;
  return l;
}

Mat cal_B(const MucogarchParams& params, double sigma_L) {
  int d = params.d;
  Mat I = Mat::Identity(d, d);
  return kron(params.B, I) + kron(I, params.B) + sigma_L * kron(params.A, params.A);
}

Mat cal_C(const MucogarchParams& params, double sigma_L, double rho_L) {
  int d = params.d;
  int n = d * d;
  Mat calB = cal_B(params, sigma_L);
  Mat In = Mat::Identity(n, n);
  Mat AA = kron(params.A, params.A);
  Mat bigA = kron(AA, AA);
  Mat Q = big_q_matrix(d);
  Mat R = rho_L * (Q + big_k_matrix(d) * Q + Mat::Identity(n * n, n * n));
  return kron(calB, In) + kron(In, calB) + bigA * R;
}

}  // namespace mucogarch
