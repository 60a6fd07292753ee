#include <doctest.h>

#include <cmath>

#include "core/gmm.hpp"
#include "core/moments.hpp"
#include "core/simulate.hpp"

using namespace mucogarch;

namespace {

Vec example_theta() {
  Vec th(10);
  th << 0.85, 0.10, -0.10, 0.75, -2.43, 0.05, -2.42, 1.0, 0.5, 1.5;
  return th;
}

const LevySpec kLevy = make_levy(4.0, 0.25, 1.0);
constexpr double kDelta = 0.1;

}  // namespace

TEST_CASE("default box brackets the center with relative half-widths") {
  Vec c(3);
  c << 2.0, -4.0, 0.0;
  const ThetaBox box = default_box_around(c, 0.5);
  CHECK(box.lo(0) == doctest::Approx(1.0));
  CHECK(box.hi(0) == doctest::Approx(3.0));
  CHECK(box.lo(1) == doctest::Approx(-6.0));
  CHECK(box.hi(1) == doctest::Approx(-2.0));
  // Near-zero coordinate keeps a floor half-width of frac.
  CHECK(box.hi(2) - box.lo(2) == doctest::Approx(1.0));
}

TEST_CASE("feasibility is zero at the benchmark point and positive outside") {
  const Vec th = example_theta();
  const ThetaBox box = default_box_around(th, 0.5);
  CHECK(feasibility_violation(th, kLevy, box) == 0.0);

  Vec out = th;
  out(1) = -0.2;  // A_12 must stay positive
  CHECK(feasibility_violation(out, kLevy, box) > 0.0);

  Vec far = th;
  far(0) = box.hi(0) + 1.0;
  CHECK(feasibility_violation(far, kLevy, box) > 0.0);

  Vec badC = th;
  badC(8) = 5.0;  // C loses positive definiteness
  CHECK(feasibility_violation(badC, kLevy, box) > 0.0);

  Vec unstable = th;
  unstable(4) = 2.43;
  unstable(6) = 2.42;
  CHECK(feasibility_violation(unstable, kLevy, default_box_around(unstable, 0.9)) > 0.0);
}

TEST_CASE("objective vanishes at the truth and walls off infeasible points") {
  const Vec th = example_theta();
  const ThetaBox box = default_box_around(th, 0.5);
  const MomentVector k = model_moment_vector(theta_to_matrices(th), kLevy, kDelta, 2);
  const Mat omega = Mat::Identity(k.values.size(), k.values.size());
  CHECK(objective(th, k, omega, kLevy, box) < 1e-20);

  Vec nearby = th;
  nearby(7) += 0.05;
  const double f = objective(nearby, k, omega, kLevy, box);
  CHECK(f > 0.0);
  CHECK(f < 1e12);

  Vec bad = th;
  bad(1) = -1.0;
  CHECK(objective(bad, k, omega, kLevy, box) >= 1e12);
}

TEST_CASE("noiseless inversion: the fit recovers the generating point") {
  const Vec th = example_theta();
  const ThetaBox box = default_box_around(th, 0.5);
  const MomentVector k = model_moment_vector(theta_to_matrices(th), kLevy, kDelta, 2);
  const Mat omega = Mat::Identity(k.values.size(), k.values.size());
  Vec init = th;
  for (int i = 0; i < init.size(); ++i) init(i) *= (i % 2 == 0) ? 1.05 : 0.95;
  OptimizerConfig cfg;
  cfg.attach_report = false;
  const EstimationResult res = estimate(k, omega, init, kLevy, box, cfg);
  CHECK(res.converged);
  CHECK(res.objective < 1e-12);
  CHECK((res.theta_hat - th).lpNorm<Eigen::Infinity>() < 1e-4);
  CHECK(res.iterations > 0);
  CHECK(res.iterations <= cfg.max_evals);

  // Byte-for-byte determinism of the whole fit.
  const EstimationResult res2 = estimate(k, omega, init, kLevy, box, cfg);
  CHECK((res.theta_hat - res2.theta_hat).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(res.objective == res2.objective);
  CHECK(res.iterations == res2.iterations);
}

TEST_CASE("weight inversion ladder: clean SPD, clipped repair, diagonal failure") {
  Mat spd(3, 3);
  spd << 4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0;
  const WeightInverse w = invert_weight(spd, CovKind::Basic);
  CHECK(w.repairs.empty());
  CHECK((w.omega * spd - Mat::Identity(3, 3)).lpNorm<Eigen::Infinity>() < 1e-12);

  // Rank-deficient input triggers the eigenvalue clip and records it.
  Vec v(3);
  v << 1.0, 2.0, -1.0;
  const Mat rank1 = v * v.transpose();
  const WeightInverse wr = invert_weight(rank1, CovKind::Basic);
  CHECK_FALSE(wr.repairs.empty());
  CHECK(wr.omega.allFinite());
  Eigen::SelfAdjointEigenSolver<Mat> es(wr.omega);
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  // A diagonal weight with a non-positive entry cannot be repaired.
  Mat diag = Mat::Zero(3, 3);
  diag(0, 0) = 1.0;
  diag(1, 1) = 0.0;
  diag(2, 2) = 2.0;
  CHECK_THROWS_AS(invert_weight(diag, CovKind::Diag), Error);
}

TEST_CASE("moment Jacobian: affine dependence on C and step-halving agreement") {
  const Vec th = example_theta();
  const JacobianResult jr = jacobian_k(th, kLevy, kDelta, 2);
  CHECK(jr.J.rows() == 4 + 3 * 16);
  CHECK(jr.J.cols() == 10);
  CHECK(jr.flagged.empty());

  // The first moment block is affine in C, so the central difference in the
  // C coordinates is exact there: columns 7..9 on rows 0..3.
  const MucogarchParams p0 = theta_to_matrices(th);
  for (int j = 7; j < 10; ++j) {
    for (double s : {1e-5, 1e-6}) {
      Vec up = th, dn = th;
      up(j) += s;
      dn(j) -= s;
      const Vec ku = mean_sq_return(theta_to_matrices(up), kLevy, kDelta);
      const Vec kd = mean_sq_return(theta_to_matrices(dn), kLevy, kDelta);
      const Vec col = (ku - kd) / (2.0 * s);
      CHECK((jr.J.block(0, j, 4, 1) - col).lpNorm<Eigen::Infinity>() < 1e-8);
    }
  }

  // Step-halving on a generic entry behaves like a second-order method:
  // error ratio near 4 when halving a deliberately large step.
  const auto kfun = [&](const Vec& t) {
    return model_moment_vector(theta_to_matrices(t), kLevy, kDelta, 2).values;
  };
  const int row = 4, colj = 0;
  const auto cdiff = [&](double s) {
    Vec up = th, dn = th;
    up(colj) += s;
    dn(colj) -= s;
    return (kfun(up)(row) - kfun(dn)(row)) / (2.0 * s);
  };
  const double exact = jr.J(row, colj);
  const double e1 = std::abs(cdiff(2e-2) - exact);
  const double e2 = std::abs(cdiff(1e-2) - exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));

  // A point jammed against the box wall cannot take the two-sided step.
  ThetaBox tight = default_box_around(th, 0.5);
  tight.hi(0) = th(0);
  CHECK_THROWS_AS(jacobian_k(th, kLevy, kDelta, 2, 1e-6, &tight), Error);
}

TEST_CASE("sandwich covariance collapses to the efficient form at the optimum") {
  const Vec th = example_theta();
  const JacobianResult jr = jacobian_k(th, kLevy, kDelta, 2);
  const Eigen::Index dim = jr.J.rows();
  // Build a well-conditioned SPD stand-in for the long-run covariance.
  Mat sigma = Mat::Identity(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) sigma(i, i) = 1.0 + 0.01 * double(i % 7);
  const Mat omega = sigma.inverse();
  const Eigen::Index n = 5000;
  const Mat cov = sandwich_covariance(th, sigma, omega, kLevy, kDelta, 2, n);
  const Mat jtoj = jr.J.transpose() * omega * jr.J;
  const Mat efficient = jtoj.inverse() / double(n);
  CHECK((cov - efficient).lpNorm<Eigen::Infinity>() / efficient.lpNorm<Eigen::Infinity>() < 1e-6);
  CHECK((cov - cov.transpose()).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("sample fits: identity weight, then the two-step refinement") {
  const Vec th = example_theta();
  const MucogarchParams p = theta_to_matrices(th);
  SimulateOptions opts;
  opts.seed = 424242;
  const ReturnsSample sample = simulate_returns(p, kLevy, kDelta, 2000, opts);
  const ThetaBox box = default_box_around(th, 0.5);
  Vec init = th;
  for (int i = 0; i < init.size(); ++i) init(i) *= (i % 2 == 0) ? 1.03 : 0.97;

  OptimizerConfig cfg;
  cfg.attach_report = false;

  const EstimationResult one = estimate_sample(sample, 2, kLevy, WeightKind::Identity, 0, init, box, cfg);
  CHECK(one.converged);
  CHECK(one.weight_kind == WeightKind::Identity);
  CHECK(one.theta_step1.size() == 0);
  CHECK_FALSE(one.has_sandwich);
  CHECK((one.theta_hat - th).lpNorm<Eigen::Infinity>() < 1.5);

  const EstimationResult two = two_step_estimate(sample, 2, kLevy, CovKind::Truncated, 5, init, box, cfg);
  CHECK(two.converged);
  CHECK(two.step1_converged);
  REQUIRE(two.theta_step1.size() == 10);
  CHECK((two.theta_step1 - one.theta_hat).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(two.objective_step1 == doctest::Approx(one.objective));
  CHECK(two.has_sandwich);
  CHECK(two.sandwich_cov.rows() == 10);
  CHECK(two.sandwich_cov.diagonal().minCoeff() > 0.0);

  const EstimationResult wtd = estimate_sample(sample, 2, kLevy, WeightKind::Basic, 0, init, box, cfg);
  CHECK(wtd.converged);
  CHECK(wtd.has_sandwich);
}
