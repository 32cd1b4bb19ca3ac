#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qlocc {

enum class ErrorCode {
  Syntax,
  Dimension,
  Split,
  EmptyState,
  DuplicateLabel,
  InvalidArgument,
  NonFinite,
  NotHermitian,
  NotOrthogonal,
  NotProduct,
  NotOplm,
  Noncommuting,
  TooLarge,
  Convergence,
  MalformedTree,
  NonContiguous,
  UnknownName,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Parse failures carry the 1-based position and the offending lexeme.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, int line, int column, std::string lexeme, const std::string& message)
      : Error(code, "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                        message + " (at '" + lexeme + "')"),
        line_(line),
        column_(column),
        lexeme_(std::move(lexeme)) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& lexeme() const noexcept { return lexeme_; }

 private:
  int line_;
  int column_;
  std::string lexeme_;
};

}  // namespace qlocc
