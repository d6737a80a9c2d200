#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace shufflemix {

// Precondition violations on caller-supplied data.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested computation does not fit the exact-state machinery (n! too large, dense solve too big).
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// A step cap was reached before the stopping condition held.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(const std::string& what, double last_value)
      : std::runtime_error(what), last_value_(last_value) {}

  // Last value of the monitored quantity (TV distance, steps, ...).
  double last_value() const noexcept { return last_value_; }

 private:
  double last_value_;
};

class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, std::complex<double> iterate, double residual)
      : std::runtime_error(what), iterate_(iterate), residual_(residual) {}

  std::complex<double> iterate() const noexcept { return iterate_; }
  double residual() const noexcept { return residual_; }

 private:
  std::complex<double> iterate_;
  double residual_;
};

}  // namespace shufflemix
