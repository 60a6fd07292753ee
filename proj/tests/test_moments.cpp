#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "core/moments.hpp"

using namespace mucogarch;

namespace {

MucogarchParams scalar_params() {
  MucogarchParams p;
  p.d = 1;
  p.A = Mat::Constant(1, 1, 0.8);
  p.B = Mat::Constant(1, 1, -1.5);
  p.C = Mat::Constant(1, 1, 1.2);
  return p;
}

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

const LevySpec kLevy = make_levy(4.0, 0.25, 1.0);
constexpr double kDelta = 0.1;

}  // namespace

TEST_CASE("scalar model: every closed-form moment matches the frozen reference") {
  const MucogarchParams p = scalar_params();
  CHECK(stationary_mean_Y(p, kLevy)(0) == doctest::Approx(0.325423728813559).epsilon(1e-13));
  CHECK(stationary_var_Y(p, kLevy)(0, 0) == doctest::Approx(0.161989909378562).epsilon(1e-13));
  CHECK(mean_sq_return(p, kLevy, kDelta)(0) ==
        doctest::Approx(0.305084745762712).epsilon(1e-13));
  CHECK(fourth_moment_sq_return(p, kLevy, kDelta)(0, 0) ==
        doctest::Approx(0.550253149468736).epsilon(1e-13));
  CHECK(acov_sq_returns(p, kLevy, kDelta, 1)(0, 0) ==
        doctest::Approx(0.0240996373573944).epsilon(1e-12));

  const MomentVector k = model_moment_vector(p, kLevy, kDelta, 2);
  REQUIRE(k.values.size() == 4);
  CHECK(k.values(0) == doctest::Approx(0.305084745762712).epsilon(1e-13));
  CHECK(k.values(1) == doctest::Approx(0.550253149468736).epsilon(1e-13));
  CHECK(k.values(2) == doctest::Approx(0.117176339454493).epsilon(1e-12));
  CHECK(k.values(3) == doctest::Approx(0.112110129930758).epsilon(1e-12));
}

TEST_CASE("d=2 model: stationary mean and variance match the frozen reference") {
  const MucogarchParams p = example1_params();
  const Vec mu = stationary_mean_Y(p, kLevy);
  CHECK(mu(0) == doctest::Approx(0.204744160310161).epsilon(1e-13));
  CHECK(mu(1) == doctest::Approx(0.0844943725475858).epsilon(1e-13));
  CHECK(mu(2) == doctest::Approx(0.0844943725475858).epsilon(1e-13));
  CHECK(mu(3) == doctest::Approx(0.181548269544295).epsilon(1e-13));

  const Mat varY = stationary_var_Y(p, kLevy);
  CHECK(varY(0, 0) == doctest::Approx(0.0962987826274385).epsilon(1e-12));
  CHECK(varY(0, 1) == doctest::Approx(0.0374448768534099).epsilon(1e-12));
  CHECK(varY(0, 3) == doctest::Approx(0.0367913276206833).epsilon(1e-12));
  CHECK(varY(1, 1) == doctest::Approx(0.036303345713024).epsilon(1e-12));
  CHECK(varY(3, 3) == doctest::Approx(0.0676206756596236).epsilon(1e-12));
  CHECK((varY - varY.transpose()).lpNorm<Eigen::Infinity>() < 1e-14);

  // The stationary mean solves the drift balance calB mu = -sigma_L (AxA) vec C.
  const Mat cb = cal_B(p, kLevy.sigma_L);
  const Vec resid = cb * mu + kLevy.sigma_L * kron(p.A, p.A) * vec(p.C);
  CHECK(resid.lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("d=2 model: squared-return moments match the frozen reference") {
  const MucogarchParams p = example1_params();
  const Vec m1 = mean_sq_return(p, kLevy, kDelta);
  CHECK(m1(0) == doctest::Approx(0.240948832062032).epsilon(1e-13));
  CHECK(m1(1) == doctest::Approx(0.116898874509517).epsilon(1e-13));
  CHECK(m1(3) == doctest::Approx(0.336309653908859).epsilon(1e-13));

  const Mat f4 = fourth_moment_sq_return(p, kLevy, kDelta);
  CHECK(f4(0, 0) == doctest::Approx(0.349764280108934).epsilon(1e-12));
  CHECK(f4(0, 1) == doctest::Approx(0.165994952269828).epsilon(1e-12));
  CHECK(f4(1, 3) == doctest::Approx(0.221151215346244).epsilon(1e-12));
  CHECK(f4(3, 3) == doctest::Approx(0.621577418376863).epsilon(1e-12));
  CHECK((f4 - f4.transpose()).lpNorm<Eigen::Infinity>() < 1e-13);

  const Mat ac1 = acov_sq_returns(p, kLevy, kDelta, 1);
  CHECK(ac1(0, 0) == doctest::Approx(0.0152955247767139).epsilon(1e-12));
  CHECK(ac1(0, 1) == doctest::Approx(0.00839478044390198).epsilon(1e-12));
  CHECK(ac1(1, 0) == doctest::Approx(0.00492577934099354).epsilon(1e-12));
  CHECK(ac1(3, 3) == doctest::Approx(0.0164769709392068).epsilon(1e-12));
}

TEST_CASE("moment vector layout: blocks, length, and lag accessors") {
  const MucogarchParams p = example1_params();
  const MomentVector k = model_moment_vector(p, kLevy, kDelta, 2);
  CHECK(k.d == 2);
  CHECK(k.r == 2);
  CHECK(k.delta == kDelta);
  REQUIRE(k.values.size() == 52);  // d^2 + (r+1) d^4

  CHECK(k.values(0) == doctest::Approx(0.240948832062032).epsilon(1e-13));
  CHECK(k.values(4) == doctest::Approx(0.349764280108934).epsilon(1e-12));
  // Lag-1 block, entries 20..23 of the flat layout.
  CHECK(k.values(20) == doctest::Approx(0.0733518644487713).epsilon(1e-12));
  CHECK(k.values(21) == doctest::Approx(0.0365614277263362).epsilon(1e-12));
  CHECK(k.values(23) == doctest::Approx(0.0913453554822982).epsilon(1e-12));
  // Lag-2 block, entries 36..39.
  CHECK(k.values(36) == doctest::Approx(0.0682602468474303).epsilon(1e-12));
  CHECK(k.values(39) == doctest::Approx(0.0880208914684353).epsilon(1e-12));

  // mean_sq() returns block 0; lag_block(h) unpacks block h+1.
  const Vec m1 = mean_sq_return(p, kLevy, kDelta);
  CHECK((k.mean_sq() - m1).lpNorm<Eigen::Infinity>() == 0.0);
  const Mat lag1 = k.lag_block(1);
  const Mat expected1 =
      acov_sq_returns(p, kLevy, kDelta, 1).transpose() + m1 * m1.transpose();
  CHECK((lag1 - expected1).lpNorm<Eigen::Infinity>() < 1e-14);
  const Mat lag0 = k.lag_block(0);
  CHECK((lag0 - fourth_moment_sq_return(p, kLevy, kDelta)).lpNorm<Eigen::Infinity>() < 1e-14);
}

TEST_CASE("autocovariance of the volatility decays along the drift semigroup") {
  const MucogarchParams p = example1_params();
  const Mat varY = stationary_var_Y(p, kLevy);
  CHECK((acov_Y(p, kLevy, 0.0) - varY).lpNorm<Eigen::Infinity>() < 1e-13);
  const Mat cb = cal_B(p, kLevy.sigma_L);
  const Mat expected = expm(cb * 0.7) * varY;
  CHECK((acov_Y(p, kLevy, 0.7) - expected).lpNorm<Eigen::Infinity>() < 1e-13);
  CHECK(acov_Y(p, kLevy, 5.0).norm() < acov_Y(p, kLevy, 0.5).norm());
}

TEST_CASE("stationary variance of the volatility is PSD in vech coordinates") {
  const MucogarchParams p = example1_params();
  const Mat varY = stationary_var_Y(p, kLevy);
  // var(vech Y) = L varY L^T must be symmetric PSD (it is a covariance).
  const Mat L = elimination_matrix(2);
  const Mat vh = Mat(L * varY * L.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(vh));
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  // Central fourth moment of vech(G G^T) is PSD as well.
  const Vec m1 = mean_sq_return(p, kLevy, kDelta);
  const Mat f4 = fourth_moment_sq_return(p, kLevy, kDelta);
  const Mat central = f4 - m1 * m1.transpose();
  const Mat cvh = Mat(L * central * L.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es2(symmetrize(cvh));
  CHECK(es2.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("unstable drift is reported, not silently evaluated") {
  MucogarchParams p = example1_params();
  p.B = -p.B;  // positive spectrum
  CHECK_THROWS_AS(model_moment_vector(p, kLevy, kDelta, 2), Error);
}

TEST_CASE("max_real_eig reads the rightmost eigenvalue") {
  Mat M(2, 2);
  M << -3.0, 0.0, 0.0, -0.5;
  CHECK(max_real_eig(M) == doctest::Approx(-0.5).epsilon(1e-14));
}
