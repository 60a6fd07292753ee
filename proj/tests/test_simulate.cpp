#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>

#include "core/moments.hpp"
#include "core/simulate.hpp"

using namespace mucogarch;

namespace {

MucogarchParams example1_params() {
  MucogarchParams p;
  p.d = 2;
  p.A.resize(2, 2);
  p.A << 0.85, 0.10, -0.10, 0.75;
  p.B.resize(2, 2);
  p.B << -2.43, 0.05, 0.05, -2.42;
  p.C.resize(2, 2);
  p.C << 1.0, 0.5, 0.5, 1.5;
  return p;
}

}  // namespace

TEST_CASE("simulation output has the requested shape and grid") {
  const MucogarchParams p = example1_params();
  const LevySpec levy = make_levy(4.0, 0.25, 1.0);
  SimulateOptions opts;
  opts.seed = 11;
  opts.collect_vol = true;
  const ReturnsSample s = simulate_returns(p, levy, 0.1, 250, opts);
  CHECK(s.d == 2);
  CHECK(s.delta == 0.1);
  CHECK(s.returns.rows() == 250);
  CHECK(s.returns.cols() == 2);
  REQUIRE(s.vol_times.size() == 250);
  REQUIRE(s.vol_Y.size() == 250);
  CHECK(s.vol_times.front() == doctest::Approx(0.1));
  CHECK(s.vol_times[1] - s.vol_times[0] == doctest::Approx(0.1));
  CHECK(s.returns.allFinite());
}

TEST_CASE("same seed and replicate reproduce the path; different replicates differ") {
  const MucogarchParams p = example1_params();
  const LevySpec levy = make_levy(4.0, 0.25, 1.0);
  SimulateOptions a;
  a.seed = 5;
  a.replicate = 3;
  const ReturnsSample s1 = simulate_returns(p, levy, 0.1, 100, a);
  const ReturnsSample s2 = simulate_returns(p, levy, 0.1, 100, a);
  CHECK((s1.returns - s2.returns).lpNorm<Eigen::Infinity>() == 0.0);
  SimulateOptions b = a;
  b.replicate = 4;
  const ReturnsSample s3 = simulate_returns(p, levy, 0.1, 100, b);
  CHECK((s1.returns - s3.returns).lpNorm<Eigen::Infinity>() > 0.0);
}

TEST_CASE("volatility path stays symmetric PSD throughout") {
  const MucogarchParams p = example1_params();
  const LevySpec levy = make_levy(4.0, 0.25, 1.0);
  SimulateOptions opts;
  opts.seed = 77;
  opts.collect_vol = true;
  const ReturnsSample s = simulate_returns(p, levy, 0.1, 2000, opts);
  int violations = 0;
  for (const Mat& Y : s.vol_Y) {
    if ((Y - Y.transpose()).lpNorm<Eigen::Infinity>() > 1e-12) ++violations;
    Eigen::SelfAdjointEigenSolver<Mat> es(Y);
    if (es.eigenvalues().minCoeff() < -1e-12) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("degenerate no-feedback limit: returns are Brownian with variance sigma_W delta C") {
  // A = 0 and a vanishing jump rate leave V = C, so windows are iid
  // N(0, sigma_W * delta * C).
  MucogarchParams p;
  p.d = 2;
  p.A = Mat::Zero(2, 2);
  p.B = -Mat::Identity(2, 2);
  p.C = Mat::Identity(2, 2);
  const LevySpec levy = make_levy(1e-12, 1.0, 1.0);
  SimulateOptions opts;
  opts.euler_substeps = 1;
  opts.burn_in = 0.0;
  opts.seed = 2024;
  const int n = 20000;
  const ReturnsSample s = simulate_returns(p, levy, 0.1, n, opts);
  CHECK(s.n_jumps == 0);

  const Vec mean = s.returns.colwise().mean();
  CHECK(std::abs(mean(0)) < 0.01);
  CHECK(std::abs(mean(1)) < 0.01);
  const Mat centered = s.returns.rowwise() - mean.transpose();
  const Mat cov = (centered.transpose() * centered) / double(n);
  CHECK(cov(0, 0) == doctest::Approx(0.1).epsilon(0.05));
  CHECK(cov(1, 1) == doctest::Approx(0.1).epsilon(0.05));
  CHECK(std::abs(cov(0, 1)) < 0.005);
}

TEST_CASE("jump arrivals per window pass a chi-square test against the Poisson law") {
  // 400 independent runs of one unit-length window at rate 4; bin the counts
  // {0,...,6,>=7} and compare to Poisson(4) at the 0.1% level (df = 7).
  MucogarchParams p;
  p.d = 1;
  p.A = Mat::Constant(1, 1, 0.8);
  p.B = Mat::Constant(1, 1, -1.5);
  p.C = Mat::Constant(1, 1, 1.2);
  const LevySpec levy = make_levy(4.0, 0.25, 1.0);
  const int reps = 400;
  std::array<int, 8> observed{};
  for (int i = 0; i < reps; ++i) {
    SimulateOptions opts;
    opts.seed = 2026;
    opts.replicate = static_cast<std::uint64_t>(i);
    const ReturnsSample s = simulate_returns(p, levy, 1.0, 1, opts);
    const int count = static_cast<int>(s.n_jumps);
    ++observed[count >= 7 ? 7 : count];
  }
  const double lambda = 4.0;
  std::array<double, 8> prob{};
  double tail = 1.0, pk = std::exp(-lambda);
  for (int k = 0; k < 7; ++k) {
    prob[k] = pk;
    tail -= pk;
    pk *= lambda / (k + 1);
  }
  prob[7] = tail;
  double chi2 = 0.0;
  for (int k = 0; k < 8; ++k) {
    const double expected = reps * prob[k];
    chi2 += (observed[k] - expected) * (observed[k] - expected) / expected;
  }
  CHECK(chi2 < 24.322);  // chi-square df=7 critical value at alpha = 0.001
}

TEST_CASE("sample mean of squared returns tracks the closed-form value") {
  const MucogarchParams p = example1_params();
  const LevySpec levy = make_levy(4.0, 0.25, 1.0);
  SimulateOptions opts;
  opts.seed = 31;
  const int n = 50000;
  const ReturnsSample s = simulate_returns(p, levy, 0.1, n, opts);
  const Vec m1 = mean_sq_return(p, levy, 0.1);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b <= a; ++b) {
      double sum = 0.0, sumsq = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x = s.returns(i, a) * s.returns(i, b);
        sum += x;
        sumsq += x * x;
      }
      const double mean = sum / n;
      const double sd = std::sqrt((sumsq / n - mean * mean) / n);
      // Returns are dependent across windows; allow a generous multiple of
      // the iid standard error.
      CHECK(std::abs(mean - m1(a * 2 + b)) < 8.0 * sd + 1e-12);
    }
  }
}

TEST_CASE("invalid simulation inputs are rejected") {
  const MucogarchParams p = example1_params();
  const LevySpec levy = make_levy(4.0, 0.25, 1.0);
  SimulateOptions opts;
  CHECK_THROWS_AS(simulate_returns(p, levy, -0.1, 10, opts), Error);
  CHECK_THROWS_AS(simulate_returns(p, levy, 0.1, 0, opts), Error);
  SimulateOptions bad;
  bad.euler_substeps = 0;
  CHECK_THROWS_AS(simulate_returns(p, levy, 0.1, 10, bad), Error);
}
