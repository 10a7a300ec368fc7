#include "subfinsler/errors.hpp"

namespace subfinsler {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotConvexPlus: return "NotConvexPlus";
    case ErrorKind::OriginOutside: return "OriginOutside";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NonMonotoneParam: return "NonMonotoneParam";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::ZeroVolumeVariation: return "ZeroVolumeVariation";
    case ErrorKind::StartOutOfDomain: return "StartOutOfDomain";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::OrderingViolation: return "OrderingViolation";
    case ErrorKind::SupportOutsideChart: return "SupportOutsideChart";
    case ErrorKind::RangeEscape: return "RangeEscape";
    case ErrorKind::LeafCrossing: return "LeafCrossing";
    case ErrorKind::CoverageGap: return "CoverageGap";
    case ErrorKind::NotUnitSpeed: return "NotUnitSpeed";
    case ErrorKind::NotUnit: return "NotUnit";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::EvaluationError: return "EvaluationError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

RangeEscapeError::RangeEscapeError(double xi, const std::string& what)
    : Error(ErrorKind::RangeEscape, what), xi_(xi) {}

ExpressionError::ExpressionError(ErrorKind kind, std::size_t offset, const std::string& what)
    : Error(kind, what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

}  // namespace subfinsler
