#pragma once

#include <stdexcept>
#include <string>

namespace mucogarch {

// Stable error identifiers; every throwing operation documents which of these
// it can raise. The C API maps them onto coarse status codes plus the name.
enum class ErrorCode {
  Ok = 0,
  NonSymmetricInput,
  ShapeError,
  LogmBranchError,
  SubspaceNotPreserved,
  ConstraintViolation,
  NonIsotropicJumps,
  UnstableDynamics,
  SingularC,
  SingularA,
  NonPsdVolatility,
  InvalidConfig,
  NonPsdInput,
  InsufficientData,
  SingularS,
  NonPdXi,
  OptimizerDisagreement,
  SingularAcov,
  NotSymPreserving,
  StripViolation,
  NegativeSquare,
  DegenerateAsymmetry,
  UnstableB,
  HypothesisViolated,
  DimensionMismatch,
  InfeasibleInit,
  WeightNotInvertible,
  BoundaryTooClose,
  SingularJ,
  TooFewReplicates,
  ParseError,
  InternalError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + msg),
        code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode c, const std::string& msg) {
  throw Error(c, msg);
}

}  // namespace mucogarch
