#include "core/gmm.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "core/optim.hpp"

namespace mucogarch {

namespace {

constexpr double kPenaltyBase = 1e12;
constexpr double kThetaTwoFloor = 1e-10;
constexpr double kJacCondLimit = 1e10;

void check_theta_dim(const Vec& theta) {
  if (theta.size() != 10) {
    fail(ErrorCode::DimensionMismatch, "theta must have 10 coordinates (d = 2 layout)");
  }
}

// Builds the d = 2 matrices without the validity checks of theta_to_matrices,
// so that infeasible points can still be scored.
void theta_matrices_raw(const Vec& t, Mat& A, Mat& B, Mat& C) {
  A.resize(2, 2);
  B.resize(2, 2);
  C.resize(2, 2);
  A << t(0), t(1), t(2), t(3);
  B << t(4), t(5), t(5), t(6);
  C << t(7), t(8), t(8), t(9);
}

Vec model_k_values(const Vec& theta, const LevySpec& levy, double delta, int r) {
  const MucogarchParams p = theta_to_matrices(theta);
  return model_moment_vector(p, levy, delta, r).values;
}

}  // namespace

const char* weight_kind_name(WeightKind k) {
  switch (k) {
    case WeightKind::Identity: return "identity";
    case WeightKind::Basic: return "basic";
    case WeightKind::Truncated: return "truncated";
    case WeightKind::Diag: return "diag";
  }
  return "unknown";
}

ThetaBox default_box_around(const Vec& center, double frac) {
  ThetaBox box;
  const Eigen::Index q = center.size();
  box.lo.resize(q);
  box.hi.resize(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double mag = std::abs(center(i));
    const double half = frac * (mag < 1e-8 ? 1.0 : mag);
    box.lo(i) = center(i) - half;
    box.hi(i) = center(i) + half;
  }
  return box;
}

double feasibility_violation(const Vec& theta, const LevySpec& levy, const ThetaBox& box) {
  check_theta_dim(theta);
  if (box.lo.size() != theta.size() || box.hi.size() != theta.size()) {
    fail(ErrorCode::DimensionMismatch, "feasibility_violation: box does not match theta");
  }
  double v = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    v += std::max(0.0, box.lo(i) - theta(i));
    v += std::max(0.0, theta(i) - box.hi(i));
  }
  v += std::max(0.0, kThetaTwoFloor - theta(1));

  Mat A, B, C;
  theta_matrices_raw(theta, A, B, C);
  Eigen::SelfAdjointEigenSolver<Mat> esc(C);
  v += std::max(0.0, -esc.eigenvalues().minCoeff());

  MucogarchParams p;
  p.d = 2;
  p.A = A;
  p.B = B;
  p.C = Mat::Identity(2, 2);  // drift operators depend on A, B only
  const Mat calB = cal_B(p, levy.sigma_L);
  v += std::max(0.0, max_real_eig(calB));
  v += std::max(0.0, max_real_eig(cal_C(p, levy.sigma_L, levy.rho_L)));
  return v;
}

double objective(const Vec& theta, const MomentVector& k_hat, const Mat& omega,
                 const LevySpec& levy, const ThetaBox& box) {
  check_theta_dim(theta);
  const Eigen::Index m = k_hat.values.size();
  if (omega.rows() != m || omega.cols() != m) {
    fail(ErrorCode::DimensionMismatch, "objective: weight matrix does not match moment vector");
  }
  const double viol = feasibility_violation(theta, levy, box);
  if (viol > 0.0) return kPenaltyBase + viol;
  Vec kv;
  try {
    kv = model_k_values(theta, levy, k_hat.delta, k_hat.r);
  } catch (const Error&) {
    // Feasible by the spectral margins yet numerically unevaluable
    // (near-singular A or C); flat-penalized.
    return kPenaltyBase;
  }
  const Vec diff = k_hat.values - kv;
  return std::max(0.0, diff.dot(omega * diff));
}

EstimationResult estimate(const MomentVector& k_hat, const Mat& omega, const Vec& theta_init,
                          const LevySpec& levy, const ThetaBox& box, const OptimizerConfig& cfg) {
  check_theta_dim(theta_init);
  if (k_hat.r < 2) fail(ErrorCode::InvalidConfig, "estimate: needs lag depth r >= 2");
  if (feasibility_violation(theta_init, levy, box) > 0.0) {
    fail(ErrorCode::InfeasibleInit, "estimate: initial theta is not feasible");
  }

  // Vertex offsets of 0.1 box-width per coordinate, flipped inward when the
  // positive offset would leave the box. After the simplex collapses, restart
  // around the incumbent with a shrunk radius until the budget runs out or an
  // iteration stops improving; the stopping rule inside each run is unchanged.
  const Eigen::Index q = theta_init.size();
  const auto build_simplex = [&](const Vec& center, double scale) {
    Mat simplex(q + 1, q);
    simplex.row(0) = center.transpose();
    for (Eigen::Index j = 0; j < q; ++j) {
      double step = scale * cfg.simplex_radius_frac * (box.hi(j) - box.lo(j));
      if (center(j) + step > box.hi(j)) step = -step;
      simplex.row(j + 1) = center.transpose();
      simplex(j + 1, j) += step;
    }
    return simplex;
  };
  const auto fn = [&](const Vec& t) { return objective(t, k_hat, omega, levy, box); };

  NmResult opt;
  opt.x = theta_init;
  opt.f = std::numeric_limits<double>::infinity();
  int used = 0;
  double scale = 1.0;
  bool out_of_budget = false;
  while (true) {
    NmOptions nm;
    nm.max_evals = cfg.max_evals - used;
    nm.rel_f_tol = cfg.rel_f_tol;
    const NmResult run = nelder_mead(fn, build_simplex(opt.x, scale), nm);
    used += run.evals;
    const double prev = opt.f;
    if (run.f < opt.f) {
      opt = run;
    }
    if (used >= cfg.max_evals) {
      out_of_budget = !run.converged;
      break;
    }
    // Stop scanning when a restart no longer buys a relative improvement or
    // the radius is below anything the objective can resolve. Gains below
    // 1e-4 relative move theta only along directions the data does not pin
    // down, so they are not worth the evaluation budget.
    if (std::isfinite(prev) && !(run.f < prev - 1e-4 * (std::abs(prev) + 1e-12))) break;
    scale *= 0.25;
    if (scale < 1e-6) break;
  }
  opt.evals = used;

  EstimationResult res;
  res.theta_hat = opt.x;
  res.objective = opt.f;
  res.iterations = used;
  res.converged = !out_of_budget;
  res.converge_reason = out_of_budget ? "evaluation budget exhausted"
                                      : "simplex spread below tolerance";
  res.weight_kind = WeightKind::Identity;
  if (cfg.attach_report && feasibility_violation(opt.x, levy, box) == 0.0) {
    try {
      res.condition_report = full_condition_report(theta_to_matrices(opt.x), levy, k_hat.delta,
                                                   cfg.report_mc_samples, cfg.report_seed);
    } catch (const Error& e) {
      res.notes.push_back(std::string("condition report failed: ") + e.what());
    }
  } else if (cfg.attach_report) {
    res.notes.push_back("condition report skipped: final point infeasible");
  }
  return res;
}

WeightInverse invert_weight(const Mat& sigma, CovKind kind) {
  if (sigma.rows() != sigma.cols()) {
    fail(ErrorCode::DimensionMismatch, "invert_weight: covariance must be square");
  }
  WeightInverse out;
  const Eigen::Index m = sigma.rows();
  const auto diag_fallback = [&]() {
    const Vec d = sigma.diagonal();
    if ((d.array() <= 0.0).any()) {
      fail(ErrorCode::WeightNotInvertible,
           "invert_weight: nonpositive diagonal entry, no invertible repair");
    }
    out.omega = d.cwiseInverse().asDiagonal();
  };
  if (kind == CovKind::Diag) {
    diag_fallback();
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(sigma));
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::InternalError, "invert_weight: eigen decomposition failed");
  }
  const Vec lam = es.eigenvalues();
  const double lmax = lam.maxCoeff();
  if (lmax <= 0.0) {
    out.repairs.push_back("covariance has no positive eigenvalue; diagonal fallback");
    diag_fallback();
    return out;
  }
  const double floor = 1e-10 * lmax;
  Vec lam_inv(m);
  bool clipped = false;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double l = lam(i) < floor ? (clipped = true, floor) : lam(i);
    lam_inv(i) = 1.0 / l;
  }
  if (clipped) out.repairs.push_back("eigenvalues clipped at 1e-10 * lambda_max before inversion");
  out.omega = es.eigenvectors() * lam_inv.asDiagonal() * es.eigenvectors().transpose();
  out.omega = symmetrize(out.omega);
  return out;
}

namespace {

// Shared by estimate_sample and two_step_estimate: attach the sandwich
// covariance when a long-run covariance is available.
void attach_sandwich(EstimationResult& res, const Mat& sigma_hat, const Mat& omega,
                     const LevySpec& levy, double delta, int r, Eigen::Index n,
                     const ThetaBox& box) {
  try {
    res.sandwich_cov = sandwich_covariance(res.theta_hat, sigma_hat, omega, levy, delta, r, n, &box);
    res.has_sandwich = true;
  } catch (const Error& e) {
    res.has_sandwich = false;
    res.notes.push_back(std::string("sandwich covariance unavailable: ") + e.what());
  }
}

CovKind weight_to_cov(WeightKind w) {
  switch (w) {
    case WeightKind::Basic: return CovKind::Basic;
    case WeightKind::Truncated: return CovKind::Truncated;
    case WeightKind::Diag: return CovKind::Diag;
    case WeightKind::Identity: break;
  }
  fail(ErrorCode::InvalidConfig, "identity weight has no covariance kind");
}

WeightKind cov_to_weight(CovKind c) {
  switch (c) {
    case CovKind::Basic: return WeightKind::Basic;
    case CovKind::Truncated: return WeightKind::Truncated;
    case CovKind::Diag: return WeightKind::Diag;
  }
  return WeightKind::Basic;
}

}  // namespace

EstimationResult estimate_sample(const ReturnsSample& sample, int r, const LevySpec& levy,
                                 WeightKind wkind, int M, const Vec& theta_init,
                                 const ThetaBox& box, const OptimizerConfig& cfg) {
  const MomentVector k_hat = empirical_moment_vector(sample, r);
  const Eigen::Index m = k_hat.values.size();
  if (wkind == WeightKind::Identity) {
    EstimationResult res = estimate(k_hat, Mat::Identity(m, m), theta_init, levy, box, cfg);
    res.weight_kind = WeightKind::Identity;
    return res;
  }
  const CovEstimate sig = long_run_cov(sample, r, M, weight_to_cov(wkind));
  WeightInverse w = invert_weight(sig.matrix, sig.kind);
  EstimationResult res = estimate(k_hat, w.omega, theta_init, levy, box, cfg);
  res.weight_kind = wkind;
  res.notes.insert(res.notes.begin(), w.repairs.begin(), w.repairs.end());
  attach_sandwich(res, sig.matrix, w.omega, levy, sample.delta, r, sample.returns.rows(), box);
  return res;
}

EstimationResult two_step_estimate(const ReturnsSample& sample, int r, const LevySpec& levy,
                                   CovKind cov_kind, int M, const Vec& theta_init,
                                   const ThetaBox& box, const OptimizerConfig& cfg) {
  const MomentVector k_hat = empirical_moment_vector(sample, r);
  const Eigen::Index m = k_hat.values.size();

  OptimizerConfig step1_cfg = cfg;
  step1_cfg.attach_report = false;
  const EstimationResult step1 =
      estimate(k_hat, Mat::Identity(m, m), theta_init, levy, box, step1_cfg);

  const CovEstimate sig = long_run_cov(sample, r, M, cov_kind);
  WeightInverse w = invert_weight(sig.matrix, sig.kind);

  EstimationResult res = estimate(k_hat, w.omega, step1.theta_hat, levy, box, cfg);
  res.weight_kind = cov_to_weight(cov_kind);
  res.notes.insert(res.notes.begin(), w.repairs.begin(), w.repairs.end());
  res.theta_step1 = step1.theta_hat;
  res.objective_step1 = step1.objective;
  res.step1_converged = step1.converged;
  attach_sandwich(res, sig.matrix, w.omega, levy, sample.delta, r, sample.returns.rows(), box);
  return res;
}

JacobianResult jacobian_k(const Vec& theta, const LevySpec& levy, double delta, int r,
                          double step, const ThetaBox* box) {
  check_theta_dim(theta);
  if (!(step > 0.0)) fail(ErrorCode::InvalidConfig, "jacobian_k: step must be positive");
  const Eigen::Index q = theta.size();
  Vec steps(q);
  for (Eigen::Index i = 0; i < q; ++i) steps(i) = std::max(step, step * std::abs(theta(i)));
  if (box) {
    for (Eigen::Index i = 0; i < q; ++i) {
      const double margin = std::min(theta(i) - box->lo(i), box->hi(i) - theta(i));
      if (margin < 2.0 * steps(i)) {
        fail(ErrorCode::BoundaryTooClose,
             "jacobian_k: coordinate " + std::to_string(i + 1) +
                 " within 2 steps of the box boundary");
      }
    }
  }

  const auto col_at = [&](Eigen::Index i, double h) {
    Vec tp = theta, tm = theta;
    tp(i) += h;
    tm(i) -= h;
    const Vec kp = model_k_values(tp, levy, delta, r);
    const Vec km = model_k_values(tm, levy, delta, r);
    return Vec(((kp - km) / (2.0 * h)).eval());
  };

  JacobianResult out;
  const Eigen::Index mdim = model_k_values(theta, levy, delta, r).size();
  out.J.resize(mdim, q);
  Mat J2(mdim, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    out.J.col(i) = col_at(i, steps(i));
    J2.col(i) = col_at(i, 2.0 * steps(i));
  }
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index a = 0; a < mdim; ++a) {
      const double denom = std::max({1.0, std::abs(out.J(a, i)), std::abs(J2(a, i))});
      if (std::abs(out.J(a, i) - J2(a, i)) > 1e-4 * denom) out.flagged.emplace_back(a, i);
    }
  }
  return out;
}

Mat sandwich_covariance(const Vec& theta_hat, const Mat& sigma_hat, const Mat& omega,
                        const LevySpec& levy, double delta, int r, Eigen::Index n,
                        const ThetaBox* box) {
  if (n <= 0) fail(ErrorCode::InvalidConfig, "sandwich_covariance: n must be positive");
  const Mat J = jacobian_k(theta_hat, levy, delta, r, 1e-6, box).J;
  if (sigma_hat.rows() != J.rows() || sigma_hat.cols() != J.rows() || omega.rows() != J.rows() ||
      omega.cols() != J.rows()) {
    fail(ErrorCode::DimensionMismatch, "sandwich_covariance: matrix sizes do not match moments");
  }
  const Mat calJ = symmetrize(J.transpose() * omega * J);
  Eigen::SelfAdjointEigenSolver<Mat> es(calJ);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  if (lmin <= 0.0 || lmax / lmin >= kJacCondLimit) {
    fail(ErrorCode::SingularJ, "sandwich_covariance: J^T Omega J singular or ill-conditioned");
  }
  const Mat calI = symmetrize(J.transpose() * omega * sigma_hat * omega * J);
  const Mat X = calJ.ldlt().solve(calI);
  const Mat S = calJ.ldlt().solve(X.transpose());
  return symmetrize(S / static_cast<double>(n));
}

}  // namespace mucogarch
