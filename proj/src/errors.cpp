#include "nslbp/errors.hpp"

namespace nslbp {

const char* err_name(Err code) {
  switch (code) {
    case Err::NegativePadding: return "NegativePadding";
    case Err::NonIntegerPadding: return "NonIntegerPadding";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::ApxOutOfRange: return "ApxOutOfRange";
    case Err::InvalidProjection: return "InvalidProjection";
    case Err::InvalidArgument: return "InvalidArgument";
    case Err::BadMagic: return "BadMagic";
    case Err::Truncated: return "Truncated";
    case Err::UnsupportedFormat: return "UnsupportedFormat";
    case Err::RowOutOfRange: return "RowOutOfRange";
    case Err::DuplicateRow: return "DuplicateRow";
    case Err::HelperNotInitialized: return "HelperNotInitialized";
    case Err::SyntaxError: return "SyntaxError";
    case Err::UnknownOpcode: return "UnknownOpcode";
    case Err::BadAddress: return "BadAddress";
    case Err::UninitializedHelper: return "UninitializedHelper";
    case Err::CapacityExceeded: return "CapacityExceeded";
    case Err::PlanMismatch: return "PlanMismatch";
    case Err::WidthTooSmall: return "WidthTooSmall";
    case Err::Overflow: return "Overflow";
    case Err::UnknownEventClass: return "UnknownEventClass";
    case Err::DivByZero: return "DivByZero";
    case Err::ConfigError: return "ConfigError";
    case Err::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace nslbp
