#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace subfinsler {

enum class ErrorKind {
  NotConvexPlus,
  OriginOutside,
  ZeroVector,
  OutOfRange,
  NonMonotoneParam,
  TooFewSamples,
  OutOfDomain,
  QuadratureFailure,
  SupportViolation,
  ZeroVolumeVariation,
  StartOutOfDomain,
  StepTooLarge,
  OrderingViolation,
  SupportOutsideChart,
  RangeEscape,
  LeafCrossing,
  CoverageGap,
  NotUnitSpeed,
  NotUnit,
  GridMismatch,
  SyntaxError,
  EvaluationError,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// M left the range of F: the characteristic tangent turned vertical at `xi`.
class RangeEscapeError : public Error {
 public:
  RangeEscapeError(double xi, const std::string& what);
  double xi() const noexcept { return xi_; }

 private:
  double xi_;
};

/// Syntax and evaluation failures of the expression grammar, located by byte
/// offset in the source string.
class ExpressionError : public Error {
 public:
  ExpressionError(ErrorKind kind, std::size_t offset, const std::string& what);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace subfinsler
