#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/levy_model.hpp"

namespace mucogarch {

enum class CondStatus { Pass, Fail, Inconclusive };

const char* cond_status_name(CondStatus s);

struct ConditionEntry {
  std::string id;      // e.g. "f.6"
  CondStatus status = CondStatus::Fail;
  double value = 0.0;  // the computed margin or scalar
  std::string detail;
};

struct ConditionReport {
  std::vector<ConditionEntry> entries;
  bool all_pass() const;
  const ConditionEntry* find(const std::string& id) const;
  void add(std::string id, CondStatus status, double value, std::string detail);
};

// Eigendecomposition of B with unit-norm eigenvector columns.
struct Diagonalization {
  CMat S;        // eigenvectors (columns)
  CVec D;        // eigenvalues
  double condS = 0.0;
  bool ok = false;  // condS < 1e8
};

// Spectra conditions: left-half-plane spectra of B, calB, calC, and the
// horizontal strip |Im(lambda(calB))| * delta < pi.
ConditionReport check_spectra(const MucogarchParams& params, const LevySpec& levy, double delta);

Diagonalization check_diagonalizable(const Mat& B);

// ||X||_S = ||(S^-1 x S^-1) X (S x S)||_2 and ||x||_S = ||(S^-1 x S^-1) x||_2.
double S_norm_operator(const Mat& X, const CMat& S);
double S_norm_vector(const Vec& x, const CMat& S);

// Margin of |(sigma_L - sigma_W)/(2 sigma_L)| ||A x A||_S < -2 max Re sigma(B):
// returns RHS - LHS; positive means the bound holds.
double bauer_fike_condition(const MucogarchParams& params, const LevySpec& levy);

// max over trace-1 PSD X of tr(M X)/tr(Xi X), in closed form:
// lambda_max of the symmetric part of Xi^{-1/2} M Xi^{-1/2}.
double K_xi(const Mat& Xi, const Mat& M);

// -lambda_max(Xi B + B^T Xi + sigma_L A^T Xi A); positive margin means the
// drift criterion holds at this Xi.
double ergodicity_condition_i(const MucogarchParams& params, const LevySpec& levy, const Mat& Xi);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct ErgodicityMargins {
  McEstimate cond_ii;   // value of the p-indexed drift integral criterion (ii)
  McEstimate cond_iii;  // value of criterion (iii)
  CondStatus status_ii = CondStatus::Inconclusive;
  CondStatus status_iii = CondStatus::Inconclusive;
};

// Monte Carlo evaluation of the two p-moment drift criteria; a criterion
// holds when its value is negative. Inconclusive when |value| < 3 stderr.
ErgodicityMargins ergodicity_conditions_ii_iii(const MucogarchParams& params, const LevySpec& levy,
                                               const Mat& Xi, double p, std::int64_t mc_samples,
                                               std::uint64_t seed);

// 1 / min{ ||(S^-1 x S^-1) vec(X)||_2 : X PSD, ||X||_2 = 1 }, by multi-start
// local optimization cross-checked against random PSD sampling.
double K2_constant(const CMat& S);

// m(p) = rate * E[(1 + alpha ||vec(y y^T)||_S)^p - 1] + 2 p max Re sigma(B),
// alpha = ||S||_2^2 ||S^-1||_2^2 K2_constant(S) ||A x A||_S, S diagonalizing B.
McEstimate m_integral(const MucogarchParams& params, const LevySpec& levy, double p,
                      std::int64_t mc_samples, std::uint64_t seed);

// Full report: b.2 spectra, f.1-f.8, g.1-g.2, informational drift criteria.
ConditionReport full_condition_report(const MucogarchParams& params, const LevySpec& levy,
                                      double delta, std::int64_t mc_samples, std::uint64_t seed);

}  // namespace mucogarch
