#pragma once

#include <stdexcept>
#include <string>

namespace mflab {

enum class ErrorKind {
  InvalidInput,        // caller handed us something outside the contract
  InvariantViolation,  // a formula disagreed with its oracle, or similar
  Incomplete,          // a bounded computation (factoring) ran out of budget
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error invalid_input(const std::string& what) {
  return Error(ErrorKind::InvalidInput, what);
}

inline Error invariant_violation(const std::string& what) {
  return Error(ErrorKind::InvariantViolation, what);
}

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid_input";
    case ErrorKind::InvariantViolation: return "invariant_violation";
    case ErrorKind::Incomplete: return "incomplete";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace mflab
