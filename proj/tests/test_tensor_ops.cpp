#include <doctest.h>

#include <cmath>

#include "core/tensor_ops.hpp"

using namespace mucogarch;

namespace {

Mat random_mat(int d, unsigned seed) {
  Mat M(d, d);
  unsigned s = seed;
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) {
      s = s * 1664525u + 1013904223u;
      M(i, j) = (static_cast<double>(s >> 8) / double(1 << 24)) * 2.0 - 1.0;
    }
  return M;
}

Mat random_sym(int d, unsigned seed) {
  Mat M = random_mat(d, seed);
  return Mat(0.5 * (M + M.transpose()));
}

}  // namespace

TEST_CASE("vec stacks columns and unvec inverts it") {
  Mat M(2, 2);
  M << 1, 2, 3, 4;  // rows (1,2) and (3,4)
  Vec v = vec(M);
  CHECK(v(0) == 1);
  CHECK(v(1) == 3);  // first column is (1,3)
  CHECK(v(2) == 2);
  CHECK(v(3) == 4);
  CHECK((unvec(v) - M).norm() == 0.0);
}

TEST_CASE("vec of a rank-one product is the kronecker of its factors") {
  for (int d : {2, 3}) {
    const Vec a = vec(random_mat(d, 11)).head(d);
    const Vec b = vec(random_mat(d, 22)).head(d);
    const Mat ab = a * b.transpose();
    CHECK((vec(ab) - kron(b, a)).norm() < 1e-14);
  }
}

TEST_CASE("vech/unvech round trip on symmetric matrices") {
  for (int d : {1, 2, 3}) {
    const Mat S = random_sym(d, 7 + d);
    const Vec h = vech(S);
    CHECK(h.size() == d * (d + 1) / 2);
    CHECK((unvech(h) - S).norm() < 1e-15);
  }
  // d = 2 ordering: (1,1), (2,1), (2,2).
  Mat S(2, 2);
  S << 5, 7, 7, 9;
  Vec h = vech(S);
  CHECK(h(0) == 5);
  CHECK(h(1) == 7);
  CHECK(h(2) == 9);
}

TEST_CASE("commutation matrix swaps vectorized transposes and is an involution") {
  for (int d : {1, 2, 3}) {
    const Mat K = commutation_matrix(d);
    const Mat M = random_mat(d, 31 + d);
    CHECK((K * vec(M) - vec(M.transpose())).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((K * K - Mat::Identity(d * d, d * d)).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("duplication and elimination matrices round-trip symmetric data") {
  for (int d : {1, 2, 3}) {
    const Mat D = duplication_matrix(d);
    const Mat L = elimination_matrix(d);
    const Mat S = random_sym(d, 101 + d);
    CHECK((D * vech(S) - vec(S)).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((L * vec(S) - vech(S)).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((L * D - Mat::Identity(d * (d + 1) / 2, d * (d + 1) / 2)).lpNorm<Eigen::Infinity>() <=
          1e-12);
  }
}

TEST_CASE("q_map block reshuffle: rank-one inputs produce kronecker products") {
  for (int d : {1, 2, 3}) {
    const Mat X = random_sym(d, 3 + d);
    const Mat Z = random_sym(d, 17 + d);
    const Mat Q = q_map(Mat(vec(X) * vec(Z).transpose()));
    CHECK((Q - kron(X, Z)).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("q_map is an involution and big_q_matrix represents it") {
  for (int d : {1, 2, 3}) {
    const Mat M = random_mat(d * d, 53 + d);
    CHECK((q_map(q_map(M)) - M).lpNorm<Eigen::Infinity>() <= 1e-12);
    const Mat Q = big_q_matrix(d);
    CHECK((Q * vec(M) - vec(q_map(M))).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((Q * Q - Mat::Identity(Q.rows(), Q.cols())).lpNorm<Eigen::Infinity>() <= 1e-12);
  }
}

TEST_CASE("big_k_matrix applies the commutation blockwise") {
  for (int d : {2, 3}) {
    const Mat Kb = big_k_matrix(d);
    CHECK(Kb.rows() == static_cast<Eigen::Index>(d) * d * d * d);
    const Mat expected = kron(Mat::Identity(d * d, d * d), commutation_matrix(d));
    CHECK((Kb - expected).lpNorm<Eigen::Infinity>() == 0.0);
  }
}

TEST_CASE("sym_restrict compresses operators that preserve symmetry") {
  // X -> R X R^T preserves symmetric matrices for any R.
  const int d = 2;
  const Mat R = random_mat(d, 77);
  const Mat op = kron(R, R);  // acts on vec
  const Mat M = sym_restrict(op);
  CHECK(M.rows() == d * (d + 1) / 2);
  const Mat S = random_sym(d, 78);
  const Vec lhs = M * vech(S);
  const Vec rhs = vech(Mat(R * S * R.transpose()));
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("sym_restrict rejects operators that leave the symmetric subspace") {
  Mat op = Mat::Identity(4, 4);
  op(1, 1) = 2.0;  // scales the (2,1) slot differently from (1,2)
  CHECK_THROWS_AS(sym_restrict(op), Error);
}

TEST_CASE("expm matches the diagonal closed form and the exp-sum identity") {
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = -1.0;
  D(1, 1) = 2.0;
  const Mat E = expm(D);
  CHECK(E(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(E(1, 1) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  CHECK(E(0, 1) == 0.0);

  const Mat M = random_mat(3, 5);
  CHECK((expm(M) * expm(-M) - Mat::Identity(3, 3)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("logm inverts expm inside the principal branch") {
  Mat M = random_mat(2, 9) * 0.3;
  M(0, 0) -= 1.0;
  M(1, 1) -= 1.2;
  CHECK((logm(expm(M)) - M).lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("logm rejects eigenvalues on the closed negative real axis") {
  Mat M = Mat::Identity(2, 2);
  M(0, 0) = -0.5;
  CHECK_THROWS_AS(logm(M), Error);
  Mat Z = Mat::Zero(2, 2);
  CHECK_THROWS_AS(logm(Z), Error);
}

TEST_CASE("psd_sqrt squares back and rejects indefinite input") {
  const Mat S = random_sym(3, 41);
  const Mat P = Mat(S * S.transpose()) + 0.1 * Mat::Identity(3, 3);
  const Mat H = psd_sqrt(P);
  CHECK((H * H - P).lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((H - H.transpose()).lpNorm<Eigen::Infinity>() < 1e-13);

  Mat N = Mat::Identity(2, 2);
  N(1, 1) = -1.0;
  CHECK_THROWS_AS(psd_sqrt(N), Error);
}

TEST_CASE("psd_sqrt clips tiny negative eigenvalues instead of failing") {
  Mat P = Mat::Identity(2, 2);
  P(1, 1) = -1e-14;
  const Mat H = psd_sqrt(P);
  CHECK(H(1, 1) == 0.0);
}

TEST_CASE("kron matches the definition entrywise") {
  Mat A(2, 2), B(2, 2);
  A << 1, 2, 3, 4;
  B << 0, 5, 6, 7;
  const Mat K = kron(A, B);
  CHECK(K.rows() == 4);
  CHECK(K(0, 1) == 5);       // A(0,0)*B(0,1)
  CHECK(K(2, 0) == 3 * 0);   // A(1,0)*B(0,0)
  CHECK(K(3, 3) == 4 * 7);   // A(1,1)*B(1,1)
  CHECK(K(2, 1) == 3 * 5);   // A(1,0)*B(0,1)
}

TEST_CASE("symmetrize averages with the transpose") {
  const Mat M = random_mat(3, 99);
  const Mat S = symmetrize(M);
  CHECK((S - S.transpose()).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((S - 0.5 * (M + M.transpose())).lpNorm<Eigen::Infinity>() == 0.0);
}
