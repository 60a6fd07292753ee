#pragma once

#include <functional>
#include <string>
#include <utility>

#include "core/moments.hpp"

namespace mucogarch {

// Closed-form parameter recovery from exact or estimated moments:
// C from the first moment; e^{calB delta} from the lag-2/lag-1 autocovariance
// ratio on the symmetric subspace; calB by principal matrix log; A and B from
// calB's block structure.
struct RecoveryResult {
  Mat A;
  Mat B;
  Mat C;
  Mat calB;               // reassembled from (A, B, sigma_L), vec-space
  double residual_expB = 0.0;  // || e^{calB delta} - input ratio || on vech coords
  double residual_calB = 0.0;  // || reassembled calB - matrix-log result || on vech coords
  double residual_C = 0.0;     // asymmetry of C before symmetrization
  bool feasible = false;       // A_12 > 0 and |A_12 - A_21| above tolerance
  bool C_pd = false;
};

// Lag ratio on vech coordinates: sym_restrict(acov2) * sym_restrict(acov1)^-1.
// Both inputs must map vec-symmetric to vec-symmetric.
Mat recover_expB(const Mat& acov1, const Mat& acov2);

// Principal log divided by delta; rejects spectra touching the closed negative
// real axis and eigenvalues whose log lands within 1e-10 of the strip edge
// |Im| = pi / delta.
Mat log_to_calB(const Mat& expB_vech, double delta);

// Block extraction from the vec-space operator calB = B (+) B + sigma_L A x A
// with symmetric B, d >= 2: off-diagonal A from block (1,2), diagonal A from
// antisymmetric parts of the diagonal blocks, then B from the remainder.
std::pair<Mat, Mat> recover_AB_from_calB(const Mat& calB, double sigma_L);

// Same extraction from the vech-space (d = 2) operator directly.
std::pair<Mat, Mat> recover_AB_from_vech(const Mat& calB_vech, double sigma_L);

// vec(C) = (sigma_L+sigma_W)^-1 delta^-1 (B (+) B)^-1 calB vec(E G_1 G_1^T).
Mat recover_C(const Vec& mean_sq, const Mat& A, const Mat& B, double sigma_L, double sigma_W,
              double delta);

// Reconstructs A from the images X -> A X A^T of the symmetric basis
// (E_jj and E_jk + E_kj); requires the first row of A to have its first
// nonzero entry positive.
Mat identify_from_AXA(const std::function<Mat(const Mat&)>& action, int d);

struct MomentInitResult {
  bool ok = false;
  Vec theta;  // d = 2 layout, valid when ok
  RecoveryResult detail;
  ErrorCode error = ErrorCode::Ok;
  std::string message;
};

// Full pipeline on a stacked moment vector (needs r >= 2); never throws for
// data-dependent failures, returns a structured failure instead.
MomentInitResult moment_init(const MomentVector& k_hat, const LevySpec& levy, double delta);

}  // namespace mucogarch
