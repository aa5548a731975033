#include "fermarkov/errors.hpp"

namespace fermarkov {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::InvalidRegions: return "InvalidRegions";
    case ErrorKind::DegenerateCenter: return "DegenerateCenter";
    case ErrorKind::NotAnAlgebra: return "NotAnAlgebra";
    case ErrorKind::NotFaithful: return "NotFaithful";
    case ErrorKind::SingularReference: return "SingularReference";
    case ErrorKind::SingularRestriction: return "SingularRestriction";
    case ErrorKind::NotSufficient: return "NotSufficient";
    case ErrorKind::FlowUnstable: return "FlowUnstable";
    case ErrorKind::NotSaturated: return "NotSaturated";
    case ErrorKind::FactorizationFailed: return "FactorizationFailed";
    case ErrorKind::NotEven: return "NotEven";
    case ErrorKind::NotMarkov: return "NotMarkov";
    case ErrorKind::UnmatchedParityAction: return "UnmatchedParityAction";
    case ErrorKind::BlockCertificationFailed: return "BlockCertificationFailed";
    case ErrorKind::CommutationFailed: return "CommutationFailed";
    case ErrorKind::RegionTooSmall: return "RegionTooSmall";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

}  // namespace fermarkov
