#pragma once

#include <stdexcept>
#include <string>

namespace thesee {

enum class ErrorKind {
  Parse,
  DuplicateThreadId,
  UndeclaredVariable,
  UnsupportedMode,
  MultiThreadInput,
  BotNotRepresentable,
  SideConditionUnverifiable,
  ProgramMismatch,
  Inconclusive,
  Overflow,
  InvalidArgument,
  Budget,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& msg)
      : Error(ErrorKind::Parse, std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Raised when exact rational arithmetic leaves the 64-bit representable range.
class OverflowError : public Error {
 public:
  OverflowError() : Error(ErrorKind::Overflow, "rational arithmetic overflow") {}
};

}  // namespace thesee
