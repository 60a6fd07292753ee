#include "core/moments.hpp"

#include <cmath>
#include <limits>

namespace mucogarch {

namespace {

double condition_number(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M);
  double smin = svd.singularValues().minCoeff();
  double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

void require_stable(const Mat& M, const char* what) {
  if (max_real_eig(M) >= 0.0)
    fail(ErrorCode::UnstableDynamics, std::string(what) + ": spectrum not in open left half-plane");
}

Vec kron_vec(const Vec& a, const Vec& b) {
  Vec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// Shared intermediates for the squared-return moment formulas.
struct Work {
  int d;
  double sig;  // sigma_L + sigma_W
  Mat calB;
  Vec mu;          // E vec(Y_0)
  Mat varY;        // var(vec Y_0)
  Vec EvecV;       // vec(C) + mu
  Vec m1;          // E X_1
  Mat E1;          // e^{calB delta}
  Mat calBT_inv;   // (calB^T)^{-1}
  Mat AAT_inv;     // ((A x A)^T)^{-1}
  Mat front0;      // calB^{-1}(I - e^{-calB delta}) * sig
  Mat tail;        // (E1^T - I)(sig calBT_inv - 2 AAT_inv)
};

Work make_work(const MucogarchParams& params, const LevySpec& levy, double delta) {
  Work w;
  w.d = params.d;
  int n = w.d * w.d;
  SecondOrderY so = second_order_Y(params, levy);
  w.calB = so.calB;
  w.mu = so.mean_vecY;
  w.varY = so.var_vecY;
  w.sig = levy.sigma_L + levy.sigma_W;
  w.EvecV = vec(params.C) + w.mu;
  w.m1 = w.sig * delta * w.EvecV;
  w.E1 = expm(w.calB * delta);
  Mat AA = kron(params.A, params.A);
  if (condition_number(params.A) > 1e12)
    fail(ErrorCode::SingularA, "squared-return moments: A numerically singular");
  Mat I = Mat::Identity(n, n);
  w.calBT_inv = w.calB.transpose().partialPivLu().solve(I);
  w.AAT_inv = AA.transpose().partialPivLu().solve(I);
  w.front0 = w.calB.partialPivLu().solve(I - expm(-w.calB * delta)) * w.sig;
  w.tail = (w.E1.transpose() - I) * (w.sig * w.calBT_inv - 2.0 * w.AAT_inv);
  return w;
}

Mat acov_from_work(const Work& w, double delta, int h) {
  return expm(w.calB * (delta * h)) * w.front0 * w.varY * w.tail;
}

Mat fourth_from_work(const Work& w, const LevySpec& levy, double delta) {
  int n = w.d * w.d;
  Mat I = Mat::Identity(n, n);
  Mat EVV = w.varY + w.EvecV * w.EvecV.transpose();
  Mat Btil =
      (w.calBT_inv * (w.E1.transpose() - I) - delta * I) * (w.sig * w.calBT_inv - 2.0 * w.AAT_inv);
  Mat D = w.sig * (0.5 * w.sig * delta * delta * w.EvecV * w.EvecV.transpose() + w.varY * Btil);
  Mat K = commutation_matrix(w.d);
  Mat qE = q_map(EVV);
  Mat IK = I + K;
  return delta * levy.rho_L * (qE + K * qE + EVV) + IK * q_map(D.transpose()) * IK + D +
         D.transpose();
}

}  // namespace

double max_real_eig(const Mat& M) {
  Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) fail(ErrorCode::InternalError, "eigensolver failed");
  return es.eigenvalues().real().maxCoeff();
}

Vec stationary_mean_Y(const MucogarchParams& params, const LevySpec& levy) {
  validate_params(params);
  Mat calB = cal_B(params, levy.sigma_L);
  require_stable(calB, "stationary_mean_Y");
  return -levy.sigma_L * calB.partialPivLu().solve(kron(params.A, params.A) * vec(params.C));
}

SecondOrderY second_order_Y(const MucogarchParams& params, const LevySpec& levy) {
  validate_params(params);
  int d = params.d;
  int n = d * d;
  SecondOrderY so;
  so.calB = cal_B(params, levy.sigma_L);
  require_stable(so.calB, "second_order_Y (calB)");
  Mat AA = kron(params.A, params.A);
  Vec vc = vec(params.C);
  so.mean_vecY = -levy.sigma_L * so.calB.partialPivLu().solve(AA * vc);

  Mat CC = cal_C(params, levy.sigma_L, levy.rho_L);
  require_stable(CC, "second_order_Y (calC)");
  if (condition_number(CC) > 1e12)
    fail(ErrorCode::SingularC, "second_order_Y: calC numerically singular");

  Mat bigA = kron(AA, AA);
  Mat Q = big_q_matrix(d);
  Mat R = levy.rho_L * (Q + big_k_matrix(d) * Q + Mat::Identity(n * n, n * n));
  Mat In = Mat::Identity(n, n);
  Mat calB_inv = so.calB.partialPivLu().solve(In);
  Mat bigAR = bigA * R;
  double sL = levy.sigma_L;
  Vec rhs = (sL * sL * CC * kron(calB_inv, calB_inv) * bigA + bigAR) * kron_vec(vc, vc) +
            (sL * kron(AA, In) + bigAR) * kron_vec(vc, so.mean_vecY) +
            (sL * kron(In, AA) + bigAR) * kron_vec(so.mean_vecY, vc);
  Vec v = -CC.partialPivLu().solve(rhs);
  so.var_vecY = symmetrize(unvec(v));
  return so;
}

Mat stationary_var_Y(const MucogarchParams& params, const LevySpec& levy) {
  return second_order_Y(params, levy).var_vecY;
}

Mat acov_Y(const MucogarchParams& params, const LevySpec& levy, double h) {
  if (h < 0.0) fail(ErrorCode::InvalidConfig, "acov_Y: h must be >= 0");
  SecondOrderY so = second_order_Y(params, levy);
  return expm(so.calB * h) * so.var_vecY;
}

Vec mean_sq_return(const MucogarchParams& params, const LevySpec& levy, double delta) {
  if (delta <= 0.0) fail(ErrorCode::InvalidConfig, "mean_sq_return: delta must be > 0");
  Vec mu = stationary_mean_Y(params, levy);
  return (levy.sigma_L + levy.sigma_W) * delta * (vec(params.C) + mu);
}

Mat acov_sq_returns(const MucogarchParams& params, const LevySpec& levy, double delta, int h) {
  if (delta <= 0.0 || h < 1) fail(ErrorCode::InvalidConfig, "acov_sq_returns: need delta > 0, h >= 1");
  Work w = make_work(params, levy, delta);
  return acov_from_work(w, delta, h);
}

Mat fourth_moment_sq_return(const MucogarchParams& params, const LevySpec& levy, double delta) {
  if (delta <= 0.0) fail(ErrorCode::InvalidConfig, "fourth_moment_sq_return: delta must be > 0");
  Work w = make_work(params, levy, delta);
  return fourth_from_work(w, levy, delta);
}

MomentVector model_moment_vector(const MucogarchParams& params, const LevySpec& levy, double delta,
                                 int r) {
  if (delta <= 0.0 || r < 0) fail(ErrorCode::InvalidConfig, "model_moment_vector: need delta > 0, r >= 0");
  Work w = make_work(params, levy, delta);
  int d = params.d;
  Eigen::Index n2 = d * d;
  Eigen::Index n4 = n2 * n2;
  MomentVector k;
  k.d = d;
  k.r = r;
  k.delta = delta;
  k.values.resize(n2 + (r + 1) * n4);
  k.values.segment(0, n2) = w.m1;
  k.values.segment(n2, n4) = vec(fourth_from_work(w, levy, delta));
  Mat mm = w.m1 * w.m1.transpose();
  for (int h = 1; h <= r; ++h) {
    // E[X_1 X_{1+h}^T] = cov(X_{1+h}, X_1)^T + m1 m1^T
    Mat blk = acov_from_work(w, delta, h).transpose() + mm;
    k.values.segment(n2 + h * n4, n4) = vec(blk);
  }
  return k;
}

}  // namespace mucogarch
