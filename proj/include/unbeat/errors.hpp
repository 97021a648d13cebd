#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace unbeat {

enum class ErrorCode {
  TooManyCrashes,
  DuplicateCrash,
  ValueOutOfRange,
  SelfDelivery,
  InvalidAdversary,
  NonexistentNode,
  InactiveProcess,
  MismatchedViews,
  NonBinaryTask,
  InvalidProtocol,
  InvalidTask,
  HorizonTooShort,
  DomainTooLarge,
  SearchBudgetExceeded,
  CapacityTooSmall,
  CrashBudget,
  BudgetViolation,
  ReconstructionMismatch,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for every library failure; `code()` identifies the
/// contract that was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace unbeat
