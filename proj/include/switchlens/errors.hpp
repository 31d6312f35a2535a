#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace switchlens {

enum class ErrorCode {
  IllegalTransition,
  TerminalState,
  NonMonotonicTimestamp,
  TaskMismatch,
  IncompleteTrace,
  EmptyInput,
  UnknownVocabularyItem,
  InvalidRecord,
  ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class IllegalTransition : public Error {
 public:
  explicit IllegalTransition(const std::string& what) : Error(ErrorCode::IllegalTransition, what) {}

 protected:
  IllegalTransition(ErrorCode code, const std::string& what) : Error(code, what) {}
};

// Completed and Trapped accept nothing; this is still an illegal transition.
class TerminalState : public IllegalTransition {
 public:
  explicit TerminalState(const std::string& what) : IllegalTransition(ErrorCode::TerminalState, what) {}
};

class NonMonotonicTimestamp : public Error {
 public:
  explicit NonMonotonicTimestamp(const std::string& what)
      : Error(ErrorCode::NonMonotonicTimestamp, what) {}
};

class IncompleteTrace : public Error {
 public:
  explicit IncompleteTrace(const std::string& what) : Error(ErrorCode::IncompleteTrace, what) {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what) : Error(ErrorCode::EmptyInput, what) {}
};

class UnknownVocabularyItem : public Error {
 public:
  explicit UnknownVocabularyItem(const std::string& what)
      : Error(ErrorCode::UnknownVocabularyItem, what) {}
};

class InvalidRecord : public Error {
 public:
  explicit InvalidRecord(const std::string& what) : Error(ErrorCode::InvalidRecord, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::ParseError, what) {}
};

/// Raised by replay; carries the failing event's position and the underlying cause.
class ReplayError : public Error {
 public:
  ReplayError(ErrorCode cause, std::size_t index, const std::string& what)
      : Error(cause, what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace switchlens
