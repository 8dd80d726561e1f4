#pragma once

#include <stdexcept>
#include <string>

namespace twrn {

enum class ErrorCode {
  NegativeProbability,
  NotNormalized,
  NonNormalDistortion,
  ShapeMismatch,
  DomainError,
  InfeasibleDistortion,
  NotDifferenceMeasure,
  NotHamming,
  BudgetExceeded,
  UnknownCommand,
  BadInputFile,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NonNormalDistortion: return "NonNormalDistortion";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InfeasibleDistortion: return "InfeasibleDistortion";
    case ErrorCode::NotDifferenceMeasure: return "NotDifferenceMeasure";
    case ErrorCode::NotHamming: return "NotHamming";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::UnknownCommand: return "UnknownCommand";
    case ErrorCode::BadInputFile: return "BadInputFile";
  }
  return "Unknown";
}

}  // namespace twrn
