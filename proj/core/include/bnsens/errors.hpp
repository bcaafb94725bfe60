#pragma once

#include <stdexcept>
#include <string>

namespace bnsens {

/// Coarse failure categories; the CLI maps them onto process exit codes
/// (io -> 1, input -> 2, analysis -> 3).
enum class ErrorCategory { io, input, analysis };

enum class ErrorKind {
  io_error,
  syntax_error,
  semantic_error,
  unknown_variable,
  unknown_value,
  unknown_parameter,
  invalid_argument,
  network_too_large,
  covariation_undefined,
  variable_not_in_scope,
  pole_at_x,
  not_hyperbolic,
  zero_evidence_probability,
  fit_self_check_failed,
  total_tie,
  tie_at_assessment,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(std::move(message)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  ErrorCategory category() const { return category_of(kind_); }

  static ErrorCategory category_of(ErrorKind kind) {
    switch (kind) {
      case ErrorKind::io_error:
        return ErrorCategory::io;
      case ErrorKind::syntax_error:
      case ErrorKind::semantic_error:
      case ErrorKind::unknown_variable:
      case ErrorKind::unknown_value:
      case ErrorKind::unknown_parameter:
      case ErrorKind::invalid_argument:
      case ErrorKind::network_too_large:
        return ErrorCategory::input;
      default:
        return ErrorCategory::analysis;
    }
  }

 private:
  ErrorKind kind_;
};

/// Parse failure with a 1-based source location.
class SyntaxError : public Error {
 public:
  SyntaxError(std::string message, std::size_t line, std::size_t column)
      : Error(ErrorKind::syntax_error, std::move(message)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace bnsens
