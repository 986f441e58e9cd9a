#pragma once

#include <stdexcept>
#include <string>

namespace bregman {

// Invalid arguments, bad configuration, schema violations.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values, failed solves, excessive clamping.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An identity or properness check did not hold.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bregman
