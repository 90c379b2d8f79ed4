#pragma once

#include <stdexcept>
#include <string>

namespace meanslab {

// Bad arguments or malformed input (wrong dimensions, invalid weights,
// asymmetric matrices, schema violations).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Mathematically out-of-domain request (non-positive eigenvalue, scalar
// function undefined on the spectrum, singular exponent).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Numerical failure of an algorithm (eigensolver breakdown, iteration limits).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace meanslab
