#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fermarkov {

enum class ErrorKind {
  NotHermitian,
  SingularMatrix,
  NotPositive,
  DimensionTooLarge,
  InvalidRegions,
  DegenerateCenter,
  NotAnAlgebra,
  NotFaithful,
  SingularReference,
  SingularRestriction,
  NotSufficient,
  FlowUnstable,
  NotSaturated,
  FactorizationFailed,
  NotEven,
  NotMarkov,
  UnmatchedParityAction,
  BlockCertificationFailed,
  CommutationFailed,
  RegionTooSmall,
  ParseError,
  InvariantViolation,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace fermarkov
