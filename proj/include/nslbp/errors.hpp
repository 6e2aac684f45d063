#pragma once

#include <stdexcept>
#include <string>

namespace nslbp {

enum class Err {
  // network core
  NegativePadding,
  NonIntegerPadding,
  ShapeMismatch,
  ApxOutOfRange,
  InvalidProjection,
  InvalidArgument,
  // sensor frontend
  BadMagic,
  Truncated,
  UnsupportedFormat,
  // sub-array
  RowOutOfRange,
  DuplicateRow,
  HelperNotInitialized,
  // ISA
  SyntaxError,
  UnknownOpcode,
  BadAddress,
  UninitializedHelper,
  // mapper
  CapacityExceeded,
  PlanMismatch,
  WidthTooSmall,
  // DPU
  Overflow,
  // perf model
  UnknownEventClass,
  DivByZero,
  // CLI / config
  ConfigError,
  IoError,
};

const char* err_name(Err code);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& message)
      : std::runtime_error(std::string(err_name(code)) + ": " + message), code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace nslbp
