#include "core/tensor_ops.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace mucogarch {

namespace {

int int_sqrt_exact(Eigen::Index n, const char* what) {
  int s = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n))));
  if (static_cast<Eigen::Index>(s) * s != n)
    fail(ErrorCode::ShapeError, std::string(what) + ": size is not a perfect square");
  return s;
}

}  // namespace

Vec vec(const Mat& M) {
  if (M.rows() != M.cols()) fail(ErrorCode::ShapeError, "vec: matrix not square");
  return Eigen::Map<const Vec>(M.data(), M.size());
}

Mat unvec(const Vec& v) {
  int n = int_sqrt_exact(v.size(), "unvec");
  return Eigen::Map<const Mat>(v.data(), n, n);
}

Vec vech(const Mat& M, double rel_tol) {
  if (M.rows() != M.cols()) fail(ErrorCode::ShapeError, "vech: matrix not square");
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > rel_tol * scale)
    fail(ErrorCode::NonSymmetricInput, "vech: relative asymmetry " + std::to_string(asym / scale));
  int d = static_cast<int>(M.rows());
  Vec out(d * (d + 1) / 2);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) out(k++) = M(i, j);
  return out;
}

Mat unvech(const Vec& v) {
  // length m = d(d+1)/2 => d = (-1 + sqrt(1+8m))/2
  double dd = (-1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(v.size()))) / 2.0;
  int d = static_cast<int>(std::llround(dd));
  if (static_cast<Eigen::Index>(d) * (d + 1) / 2 != v.size())
    fail(ErrorCode::ShapeError, "unvech: bad length");
  Mat M(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) {
      M(i, j) = v(k);
      M(j, i) = v(k);
      ++k;
    }
  return M;
}

Mat commutation_matrix(int d) {
  Mat K = Mat::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) K(j + d * i, i + d * j) = 1.0;
  return K;
}

Mat q_map(const Mat& X) {
  if (X.rows() != X.cols()) fail(ErrorCode::ShapeError, "q_map: matrix not square");
  int d = int_sqrt_exact(X.rows(), "q_map");
  Mat out(X.rows(), X.cols());
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l)
      for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) out(k * d + l, p * d + q) = X(k * d + p, l * d + q);
  return out;
}

Mat big_q_matrix(int d) {
  int n = d * d;
  Mat Q = Mat::Zero(n * n, n * n);
  // column c is vec(q_map(unvec(e_c))); q_map permutes entries, so each
  // column is a unit vector and Q is a permutation matrix.
  for (int c = 0; c < n * n; ++c) {
    int col = c / n, row = c % n;  // e_c = unit at (row, col); row = k*d+p, col = l*d+q
    int k = row / d, p = row % d;
    int l = col / d, q = col % d;
    int orow = k * d + l, ocol = p * d + q;  // input (k*d+p, l*d+q) lands at (k*d+l, p*d+q)
    Q(ocol * n + orow, c) = 1.0;
  }
  return Q;
}

Mat big_k_matrix(int d) {
  return kron(Mat::Identity(d * d, d * d), commutation_matrix(d));
}

Mat duplication_matrix(int d) {
  int m = d * (d + 1) / 2;
  Mat D = Mat::Zero(d * d, m);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) {
      D(i + d * j, k) = 1.0;
      if (i != j) D(j + d * i, k) = 1.0;
      ++k;
    }
  return D;
}

Mat elimination_matrix(int d) {
  int m = d * (d + 1) / 2;
  Mat L = Mat::Zero(m, d * d);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) L(k++, i + d * j) = 1.0;
  return L;
}

Mat sym_restrict(const Mat& T, double tol) {
  if (T.rows() != T.cols()) fail(ErrorCode::ShapeError, "sym_restrict: matrix not square");
  int d = int_sqrt_exact(T.rows(), "sym_restrict");
  // Check T maps vec(S_d) into vec(S_d) on the E_ii and E_ij + E_ji basis.
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i) {
      Mat S = Mat::Zero(d, d);
      S(i, j) = 1.0;
      S(j, i) = 1.0;
      Vec w = T * vec(S);
      Mat W = unvec(w);
      double scale = std::max(1.0, W.cwiseAbs().maxCoeff());
      if ((W - W.transpose()).cwiseAbs().maxCoeff() > tol * scale)
        fail(ErrorCode::SubspaceNotPreserved,
             "sym_restrict: image of basis element (" + std::to_string(i) + "," +
                 std::to_string(j) + ") is not symmetric");
    }
  return elimination_matrix(d) * T * duplication_matrix(d);
}

Mat expm(const Mat& M) {
  if (M.rows() != M.cols()) fail(ErrorCode::ShapeError, "expm: matrix not square");
  return M.exp();
}

Mat logm(const Mat& M) {
  if (M.rows() != M.cols()) fail(ErrorCode::ShapeError, "logm: matrix not square");
  Eigen::EigenSolver<Mat> es(M);
  if (es.info() != Eigen::Success) fail(ErrorCode::InternalError, "logm: eigensolver failed");
  for (int i = 0; i < M.rows(); ++i) {
    std::complex<double> lam = es.eigenvalues()(i);
    double mag = std::abs(lam);
    if (lam.real() <= 0.0 && std::abs(lam.imag()) <= 1e-12 * std::max(1.0, mag))
      fail(ErrorCode::LogmBranchError,
           "logm: eigenvalue on the closed negative real axis (" + std::to_string(lam.real()) + ")");
  }
  return M.log();
}

Mat psd_sqrt(const Mat& M, double tol) {
  if (M.rows() != M.cols()) fail(ErrorCode::ShapeError, "psd_sqrt: matrix not square");
  double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
    fail(ErrorCode::NonSymmetricInput, "psd_sqrt: input not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(M));
  if (es.info() != Eigen::Success) fail(ErrorCode::InternalError, "psd_sqrt: eigensolver failed");
  Vec lam = es.eigenvalues();
  double lmax = std::max(1.0, lam.cwiseAbs().maxCoeff());
  Vec s(lam.size());
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i) < -tol * lmax)
      fail(ErrorCode::NonPsdInput, "psd_sqrt: eigenvalue " + std::to_string(lam(i)));
    s(i) = std::sqrt(std::max(0.0, lam(i)));
  }
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().transpose();
}

Mat kron(const Mat& A, const Mat& B) {
  Mat out(A.rows() * B.rows(), A.cols() * B.cols());
  out = Eigen::kroneckerProduct(A, B);
  return out;
}

}  // namespace mucogarch
