#include "unbeat/errors.hpp"

namespace unbeat {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooManyCrashes: return "TooManyCrashes";
    case ErrorCode::DuplicateCrash: return "DuplicateCrash";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::SelfDelivery: return "SelfDelivery";
    case ErrorCode::InvalidAdversary: return "InvalidAdversary";
    case ErrorCode::NonexistentNode: return "NonexistentNode";
    case ErrorCode::InactiveProcess: return "InactiveProcess";
    case ErrorCode::MismatchedViews: return "MismatchedViews";
    case ErrorCode::NonBinaryTask: return "NonBinaryTask";
    case ErrorCode::InvalidProtocol: return "InvalidProtocol";
    case ErrorCode::InvalidTask: return "InvalidTask";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::DomainTooLarge: return "DomainTooLarge";
    case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorCode::CapacityTooSmall: return "CapacityTooSmall";
    case ErrorCode::CrashBudget: return "CrashBudget";
    case ErrorCode::BudgetViolation: return "BudgetViolation";
    case ErrorCode::ReconstructionMismatch: return "ReconstructionMismatch";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace unbeat
