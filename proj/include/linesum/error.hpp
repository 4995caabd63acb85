#pragma once

#include <stdexcept>
#include <string>

namespace linesum {

enum class ErrorKind {
  MarginMismatch,
  OutOfRange,
  DegenerateDensity,
  ResourceLimit,
  NonConvergence,
  NumericalBlowup,
  IdentityViolation,
  DomainError,
  InvalidInput,
};

const char* to_string(ErrorKind kind);

/// Exception carrying a machine-readable kind; the CLI maps kinds to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace linesum
