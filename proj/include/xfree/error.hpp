#pragma once

#include <stdexcept>
#include <string>

namespace xfree {

enum class ErrorKind {
  Parse,
  Precondition,
  Budget,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

enum class ParseErrorCode {
  Malformed,
  WrongArity,
  TooFewPoints,
  DuplicatePoint,
};

class ParseError : public Error {
 public:
  ParseError(ParseErrorCode code, int line, const std::string& what)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + what), code_(code), line_(line) {}
  ParseErrorCode code() const noexcept { return code_; }
  int line() const noexcept { return line_; }

 private:
  ParseErrorCode code_;
  int line_;
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what) : Error(ErrorKind::Precondition, what) {}
};

class BudgetError : public Error {
 public:
  explicit BudgetError(const std::string& what) : Error(ErrorKind::Budget, what) {}
};

}  // namespace xfree
