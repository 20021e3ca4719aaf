#pragma once

#include <stdexcept>
#include <string>

namespace kdsim {

// Invalid or inconsistent user input (config files, operation preconditions).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A derived quantity overflowed, underflowed or became NaN.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Momentum-grid support left the grid, or the grid cannot represent an operation.
class GridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fock-space truncation no longer holds the cavity state.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kdsim
