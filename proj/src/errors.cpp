#include "switchlens/errors.hpp"

namespace switchlens {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::TerminalState: return "TerminalState";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::TaskMismatch: return "TaskMismatch";
    case ErrorCode::IncompleteTrace: return "IncompleteTrace";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::UnknownVocabularyItem: return "UnknownVocabularyItem";
    case ErrorCode::InvalidRecord: return "InvalidRecord";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Error";
}

}  // namespace switchlens
