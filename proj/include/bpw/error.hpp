#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bpw {

enum class ErrorCode {
  // format
  BadMagic,
  UnsupportedVersion,
  HeaderBoundViolation,
  Truncated,
  TrailingData,
  ReservedGateKind,
  OperandOutOfRange,
  EmptyProgram,
  // vm
  InputLengthMismatch,
  LockedRegisterRead,
  NotReadyRead,
  UninitializedRead,
  PriorLevelUnderflow,
  InsufficientOutputLevels,
  // workloads
  InfeasibleDensity,
  WidthTooSmall,
  TooSmallN,
  InvalidSpec,
  // bench
  ValidationFailed,
  InsufficientSpan,
  ClockUnavailable,
  IoFailure,
  BadRecord,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::HeaderBoundViolation: return "HeaderBoundViolation";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::TrailingData: return "TrailingData";
    case ErrorCode::ReservedGateKind: return "ReservedGateKind";
    case ErrorCode::OperandOutOfRange: return "OperandOutOfRange";
    case ErrorCode::EmptyProgram: return "EmptyProgram";
    case ErrorCode::InputLengthMismatch: return "InputLengthMismatch";
    case ErrorCode::LockedRegisterRead: return "LockedRegisterRead";
    case ErrorCode::NotReadyRead: return "NotReadyRead";
    case ErrorCode::UninitializedRead: return "UninitializedRead";
    case ErrorCode::PriorLevelUnderflow: return "PriorLevelUnderflow";
    case ErrorCode::InsufficientOutputLevels: return "InsufficientOutputLevels";
    case ErrorCode::InfeasibleDensity: return "InfeasibleDensity";
    case ErrorCode::WidthTooSmall: return "WidthTooSmall";
    case ErrorCode::TooSmallN: return "TooSmallN";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::InsufficientSpan: return "InsufficientSpan";
    case ErrorCode::ClockUnavailable: return "ClockUnavailable";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::BadRecord: return "BadRecord";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the evaluators; records the offending instruction.
class VmError : public Error {
 public:
  VmError(ErrorCode code, std::uint64_t instruction, const std::string& what)
      : Error(code, "instruction " + std::to_string(instruction) + ": " + what),
        instruction_(instruction) {}

  std::uint64_t instruction() const noexcept { return instruction_; }

 private:
  std::uint64_t instruction_;
};

}  // namespace bpw
