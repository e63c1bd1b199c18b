#pragma once

#include <stdexcept>
#include <string>

namespace coalguard {

enum class ErrorKind {
  syntax,
  empty_coalition,
  unknown_variable,
  unknown_agent,
  diamond_not_allowed,
  budget_exceeded,
  ownership_violation,
  invalid_model,
  insecure_start,
  precondition,
  io,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers what went wrong.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Parse failure; `position()` is a 0-based byte offset into the input.
class SyntaxError : public Error {
public:
  SyntaxError(ErrorKind kind, std::size_t position, const std::string& what)
      : Error(kind, what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

}  // namespace coalguard
