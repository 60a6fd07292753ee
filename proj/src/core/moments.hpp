#pragma once

#include "core/levy_model.hpp"

namespace mucogarch {

// Stacked moment vector of the squared-return process X_i = vec(G_i G_i^T):
//   values = [ E X_1 (d^2) ; vec(E[X_1 X_1^T]) ; vec(E[X_1 X_{1+h}^T]) h=1..r ]
// Total length d^2 + (r+1) d^4, all blocks non-central.
struct MomentVector {
  int d = 0;
  int r = 0;
  double delta = 0.0;
  Vec values;

  Eigen::Index n4() const { return static_cast<Eigen::Index>(d) * d * d * d; }
  Vec mean_sq() const { return values.segment(0, d * d); }
  // h = 0..r; unvec gives the d^2 x d^2 matrix E[X_1 X_{1+h}^T].
  Mat lag_block(int h) const {
    Vec seg = values.segment(d * d + static_cast<Eigen::Index>(h) * n4(), n4());
    return unvec(seg);
  }
};

// Stationary second-order structure of vec(Y).
struct SecondOrderY {
  Vec mean_vecY;  // d^2
  Mat var_vecY;   // d^2 x d^2, symmetric PSD
  Mat calB;       // d^2 x d^2
};

// E vec(Y_0) = -sigma_L calB^{-1} (A x A) vec(C); requires Re sigma(calB) < 0.
Vec stationary_mean_Y(const MucogarchParams& params, const LevySpec& levy);

// var(vec Y_0) via a linear solve against calC, symmetrized.
Mat stationary_var_Y(const MucogarchParams& params, const LevySpec& levy);

// Both of the above plus calB in one evaluation.
SecondOrderY second_order_Y(const MucogarchParams& params, const LevySpec& levy);

// acov_Y(h) = e^{calB h} var(vec Y_0), h >= 0 real.
Mat acov_Y(const MucogarchParams& params, const LevySpec& levy, double h);

// E X_1 = (sigma_L + sigma_W) * delta * vec(C + E Y_0).
Vec mean_sq_return(const MucogarchParams& params, const LevySpec& levy, double delta);

// cov(X_{1+h}, X_1), h >= 1 integer; entry (a,b) = cov(X_{1+h}(a), X_1(b)).
// Requires invertible A.
Mat acov_sq_returns(const MucogarchParams& params, const LevySpec& levy, double delta, int h);

// E[X_1 X_1^T], symmetric.
Mat fourth_moment_sq_return(const MucogarchParams& params, const LevySpec& levy, double delta);

// Full stacked vector; lag block h stores E[X_1 X_{1+h}^T]
// = acov_sq_returns(h)^T + (E X_1)(E X_1)^T.
MomentVector model_moment_vector(const MucogarchParams& params, const LevySpec& levy, double delta,
                                 int r);

// Largest real part of sigma(calB); negative iff the mean dynamics are stable.
double max_real_eig(const Mat& M);

}  // namespace mucogarch
