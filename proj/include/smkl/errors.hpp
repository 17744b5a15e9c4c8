#pragma once

#include <stdexcept>
#include <string>

namespace smkl {

/// Bad user input: malformed files, invalid parameters, dimension mismatches.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A requested computation exceeds a configured resource budget.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure: conditioning, infeasibility, inconsistent bounds.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace smkl
