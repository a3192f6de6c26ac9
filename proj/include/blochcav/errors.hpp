#pragma once

#include <stdexcept>
#include <string>

namespace blochcav {

/// Bad input: malformed files, out-of-range parameters, violated preconditions.
/// The CLI maps it to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed (singular system, unconverged sum, bad bracket).
/// The CLI maps it to exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace blochcav
