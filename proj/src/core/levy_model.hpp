#pragma once

#include "core/tensor_ops.hpp"

namespace mucogarch {

// Model matrices. C must be symmetric positive definite; A, B square of the
// same dimension.
struct MucogarchParams {
  int d = 0;
  Mat A;
  Mat B;
  Mat C;
};

// Driving-noise moment constants for Brownian part (variance scale sigma_W)
// plus compound-Poisson jumps with isotropic Gaussian sizes N(0, s I_d).
struct LevySpec {
  double sigma_W = 0.0;
  double cpp_rate = 0.0;
  double jump_scale = 0.0;  // s
  double sigma_L = 0.0;     // cpp_rate * s
  double rho_L = 0.0;       // cpp_rate * s^2
};

// Box constraints defining the compact parameter set for estimation.
struct ThetaBox {
  Vec lo;
  Vec hi;
};

// d=2 identifiable layout, 10 coordinates:
//   A = [[t1, t2], [t3, t4]] (row-wise), B = [[t5, t6], [t6, t7]],
//   C = [[t8, t9], [t9, t10]]; requires t2 > 0 and positive definite C.
MucogarchParams theta_to_matrices(const Vec& theta);

// Inverse of theta_to_matrices; requires d = 2, symmetric B and C.
Vec matrices_to_theta(const MucogarchParams& params, double tol = 1e-10);

// jump_cov must equal s * I_d (within 1e-12 relative); derives sigma_L, rho_L.
LevySpec levy_constants(double cpp_rate, const Mat& jump_cov, double sigma_W);

// Same derivation from the scalar jump variance directly.
LevySpec make_levy(double cpp_rate, double jump_scale, double sigma_W);

// B (+) B + sigma_L A (x) A acting on vec(Y), dimension d^2.
Mat cal_B(const MucogarchParams& params, double sigma_L);

// Drift operator of vec(Y) (x) vec(Y), dimension d^4:
// calB (+) calB + ((A(x)A)(x)(A(x)A)) * rho_L(Q + K Q + I).
Mat cal_C(const MucogarchParams& params, double sigma_L, double rho_L);

// Validates shapes, C symmetry/positive-definiteness.
void validate_params(const MucogarchParams& params);

}  // namespace mucogarch
