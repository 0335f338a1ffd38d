#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Invalid physical or numerical input (non-positive length, unknown material...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical evaluation did not reach its tolerance, or produced non-finite values.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace casimir
