#pragma once

#include <Eigen/Dense>

#include "core/errors.hpp"

namespace mucogarch {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Column-major stacking; vec and unvec are mutual inverses on square matrices.
Vec vec(const Mat& M);

// Inverse of vec; side length inferred. Throws ShapeError if the length is
// not a perfect square.
Mat unvec(const Vec& v);

// Lower-triangle column-major stacking of a symmetric matrix.
// Throws NonSymmetricInput if relative asymmetry exceeds rel_tol.
Vec vech(const Mat& M, double rel_tol = 1e-10);

// Inverse of vech (symmetric completion). Throws ShapeError on bad length.
Mat unvech(const Vec& v);

// K_d with K_d * vec(A) = vec(A^T); a symmetric permutation, K_d^2 = I.
Mat commutation_matrix(int d);

// Index permutation on d^2 x d^2 matrices:
// out[(k-1)d+l, (p-1)d+q] = in[(k-1)d+p, (l-1)d+q] (1-based); an involution
// with q_map(vec(X) vec(Z)^T) = X kron Z for symmetric X, Z.
// Throws ShapeError unless the side length is a perfect square.
Mat q_map(const Mat& X);

// d^4-dimensional matrix of vec . q_map . unvec; a permutation matrix.
Mat big_q_matrix(int d);

// d^4-dimensional matrix of vec(K_d * unvec(x)); equals I_{d^2} kron K_d.
Mat big_k_matrix(int d);

// D_d with D_d * vech(S) = vec(S) for symmetric S.
Mat duplication_matrix(int d);

// L_d with L_d * vec(M) = vech-stacking of M's lower triangle; L_d D_d = I.
Mat elimination_matrix(int d);

// Restriction of a vec-space operator to the symmetric subspace, in vech
// coordinates: returns L T D. Requires T to map vec(S_d) into vec(S_d);
// checked on a basis, throws SubspaceNotPreserved beyond tol.
Mat sym_restrict(const Mat& T, double tol = 1e-8);

// Matrix exponential (Pade scaling-and-squaring).
Mat expm(const Mat& M);

// Principal matrix logarithm (inverse scaling-and-squaring on a Schur form).
// Throws LogmBranchError if the spectrum touches the closed negative real axis.
Mat logm(const Mat& M);

// Spectral square root of a symmetric PSD matrix; eigenvalues in
// [-tol*max(1,|lambda|_max), 0) are clipped to 0, below that throws
// NonPsdInput. Non-symmetric input throws NonSymmetricInput.
Mat psd_sqrt(const Mat& M, double tol = 1e-10);

// Kronecker product, dense.
Mat kron(const Mat& A, const Mat& B);

// (M + M^T)/2.
inline Mat symmetrize(const Mat& M) { return 0.5 * (M + M.transpose()); }

}  // namespace mucogarch
