#pragma once

#include <stdexcept>
#include <string>

namespace sacbf {

/// Caller broke a documented precondition (dimension mismatch, bad parameter).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A value lies outside the mathematical domain of an operation,
/// e.g. a fractional power of a negative barrier value.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The top barrier level is already negative at a sampling instant, so the
/// sampled-data certificate cannot be formed.
class SetExitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time-windowed barrier was evaluated outside its window.
class OutOfWindowError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Iterative solver hit its iteration cap.
class MaxIterError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integrator could not advance (step-size underflow or non-finite state).
class SimulationAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sacbf
