#pragma once

#include <stdexcept>
#include <string>

namespace hardyheat {

// Invalid (d, alpha) pair, beta outside (0, d - alpha), and similar.
class ParameterDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// c outside the range where a harmonic exponent exists.
class OutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Evaluation at x = 0 or on the domain boundary.
class SingularPointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Bad grid, scenario, compact set or test-function support. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a precondition (dimension mismatch, negative data, t <= 0).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A numerical invariant failed beyond tolerance. CLI exit code 1.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hardyheat
