#pragma once

#include <stdexcept>
#include <string>

namespace smectic {

enum class ErrorKind {
  Argument,    // bad call: axis out of range, grid mismatch, wrong dimension
  Constraint,  // tensor constraint violated (trace, symmetry)
  Parameter,   // physical parameter outside its admissible regime
  Numerical,   // non-finite intermediate (e.g. relaxation factor overflow)
  Blowup,      // field magnitude diverged during time stepping
  Invariant,   // a runtime-asserted structural property failed
  Config,      // configuration text could not be accepted
  Io,          // filesystem failure
  Internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when a field becomes non-finite or exceeds the blow-up threshold.
class BlowupError : public Error {
 public:
  BlowupError(long step, double magnitude, const std::string& message)
      : Error(ErrorKind::Blowup, message), step_(step), magnitude_(magnitude) {}

  long step() const noexcept { return step_; }
  double magnitude() const noexcept { return magnitude_; }

 private:
  long step_;
  double magnitude_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace smectic
