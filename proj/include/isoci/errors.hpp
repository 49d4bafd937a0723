#pragma once

#include <stdexcept>
#include <string>

namespace isoci {

// Malformed or degenerate input data (bad CSV, tied inspection times, ...).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// A requested constraint cannot be satisfied by any admissible function.
class ConstraintInfeasibleError : public std::runtime_error {
public:
  explicit ConstraintInfeasibleError(const std::string& msg)
    : std::runtime_error(msg) {}
};

// An iterative solve failed to converge within its iteration budget.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace isoci
