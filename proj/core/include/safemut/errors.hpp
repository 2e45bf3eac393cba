#pragma once

#include <stdexcept>
#include <string>

namespace safemut {

/// Shapes, ids or settings that do not fit together.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A NaN or infinity showed up where a finite value is required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called on input that violates its contract.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace safemut
