#pragma once

#include <stdexcept>
#include <string>

namespace ctgp {

// Malformed arguments to an operation: dimension mismatch, non-finite values,
// inconsistent histories.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameters outside their admissible range (delta, lambda, alpha, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An invariant the algorithms rely on was violated at runtime.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace ctgp
