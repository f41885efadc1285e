#pragma once

#include <stdexcept>
#include <string>

namespace tfs {

// Bad sizes, out-of-range parameters, malformed configuration.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A matrix that has to be inverted is singular or too badly conditioned.
class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Brute-force enumeration would exceed the configured size limit.
class ScaleGuard : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The constraint set of an optimization problem is empty.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File contents do not match the expected text/CSV layout.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tfs
