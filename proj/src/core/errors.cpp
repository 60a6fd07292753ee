#include "core/errors.hpp"

namespace mucogarch {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::NonSymmetricInput: return "NonSymmetricInput";
    case ErrorCode::ShapeError: return "ShapeError";
    case ErrorCode::LogmBranchError: return "LogmBranchError";
    case ErrorCode::SubspaceNotPreserved: return "SubspaceNotPreserved";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::NonIsotropicJumps: return "NonIsotropicJumps";
    case ErrorCode::UnstableDynamics: return "UnstableDynamics";
    case ErrorCode::SingularC: return "SingularC";
    case ErrorCode::SingularA: return "SingularA";
    case ErrorCode::NonPsdVolatility: return "NonPsdVolatility";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NonPsdInput: return "NonPsdInput";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SingularS: return "SingularS";
    case ErrorCode::NonPdXi: return "NonPdXi";
    case ErrorCode::OptimizerDisagreement: return "OptimizerDisagreement";
    case ErrorCode::SingularAcov: return "SingularAcov";
    case ErrorCode::NotSymPreserving: return "NotSymPreserving";
    case ErrorCode::StripViolation: return "StripViolation";
    case ErrorCode::NegativeSquare: return "NegativeSquare";
    case ErrorCode::DegenerateAsymmetry: return "DegenerateAsymmetry";
    case ErrorCode::UnstableB: return "UnstableB";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InfeasibleInit: return "InfeasibleInit";
    case ErrorCode::WeightNotInvertible: return "WeightNotInvertible";
    case ErrorCode::BoundaryTooClose: return "BoundaryTooClose";
    case ErrorCode::SingularJ: return "SingularJ";
    case ErrorCode::TooFewReplicates: return "TooFewReplicates";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::InternalError: return "InternalError";
  }
  return "Unknown";
}

}  // namespace mucogarch
