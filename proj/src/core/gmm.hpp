#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/diagnostics.hpp"
#include "core/sample_stats.hpp"

namespace mucogarch {

enum class WeightKind { Identity, Basic, Truncated, Diag };

const char* weight_kind_name(WeightKind k);

// Nelder-Mead and reporting knobs for one estimation call.
struct OptimizerConfig {
  int max_evals = 20000;
  double rel_f_tol = 1e-10;         // simplex spread stopping rule, relative
  double simplex_radius_frac = 0.1; // initial vertex offset as fraction of box width
  bool attach_report = true;        // condition report at theta_hat
  std::int64_t report_mc_samples = 200000;
  std::uint64_t report_seed = 0x5EEDD1A6u;
};

struct EstimationResult {
  Vec theta_hat;
  double objective = 0.0;
  bool converged = false;
  std::string converge_reason;
  WeightKind weight_kind = WeightKind::Identity;
  int iterations = 0;  // objective evaluations consumed
  bool has_sandwich = false;
  Mat sandwich_cov;  // q x q, present iff has_sandwich
  ConditionReport condition_report;
  std::vector<std::string> notes;  // weight repairs, fallbacks, sandwich failures
  // Two-step bookkeeping (size-0 theta_step1 for one-step fits).
  Vec theta_step1;
  double objective_step1 = 0.0;
  bool step1_converged = false;
};

// Box centered at `center`, half-width frac*|center_i| per coordinate
// (minimum half-width frac for near-zero coordinates).
ThetaBox default_box_around(const Vec& center, double frac = 0.5);

// 0 when theta is feasible: inside the box, A_12 > 0, C positive definite,
// and both vec- and vec-of-vec drift operators stable. Positive and
// continuous in theta otherwise.
double feasibility_violation(const Vec& theta, const LevySpec& levy, const ThetaBox& box);

// (k_hat - k_theta)^T Omega (k_hat - k_theta) for feasible theta; for
// infeasible theta 1e12 plus the violation measure, so the simplex is steered
// back without flat plateaus.
double objective(const Vec& theta, const MomentVector& k_hat, const Mat& omega,
                 const LevySpec& levy, const ThetaBox& box);

// One-step fit by Nelder-Mead from theta_init; deterministic given inputs.
EstimationResult estimate(const MomentVector& k_hat, const Mat& omega, const Vec& theta_init,
                          const LevySpec& levy, const ThetaBox& box,
                          const OptimizerConfig& cfg = {});

// One-step fit from raw returns with the weight implied by `wkind`
// (Identity, or the repaired inverse of the long-run covariance); attaches
// the sandwich covariance when a long-run covariance was computed.
EstimationResult estimate_sample(const ReturnsSample& sample, int r, const LevySpec& levy,
                                 WeightKind wkind, int M, const Vec& theta_init,
                                 const ThetaBox& box, const OptimizerConfig& cfg = {});

// Step 1 with identity weight, then step 2 with the repaired inverse of the
// long-run covariance taken at the data, restarted from the step-1 fit.
EstimationResult two_step_estimate(const ReturnsSample& sample, int r, const LevySpec& levy,
                                   CovKind cov_kind, int M, const Vec& theta_init,
                                   const ThetaBox& box, const OptimizerConfig& cfg = {});

// Repair ladder for inverting an estimated long-run covariance:
// eigenvalue clip at 1e-10 * lambda_max, then diagonal fallback, then error.
struct WeightInverse {
  Mat omega;
  std::vector<std::string> repairs;
};
WeightInverse invert_weight(const Mat& sigma, CovKind kind);

// Central-difference Jacobian of theta -> model moment vector, with a
// step-halving agreement check; disagreeing entries are flagged, not fatal.
struct JacobianResult {
  Mat J;  // dim(k) x q
  std::vector<std::pair<Eigen::Index, Eigen::Index>> flagged;
};
JacobianResult jacobian_k(const Vec& theta, const LevySpec& levy, double delta, int r,
                          double step = 1e-6, const ThetaBox* box = nullptr);

// (J^T Omega J)^{-1} (J^T Omega Sigma Omega J) (J^T Omega J)^{-1} / n,
// symmetrized; J is the moment Jacobian at theta_hat.
Mat sandwich_covariance(const Vec& theta_hat, const Mat& sigma_hat, const Mat& omega,
                        const LevySpec& levy, double delta, int r, Eigen::Index n,
                        const ThetaBox* box = nullptr);

}  // namespace mucogarch
