#pragma once

#include <stdexcept>
#include <string>

namespace covpair {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// (rho, sigma) outside the open admissible region.
class ConstraintViolation : public Error {
 public:
  enum class Which {
    SigmaBound,  // 1 - sigma^2 > 0 failed
    XiBound,     // 1 - 2 rho^2 + sigma > 0 failed
  };

  ConstraintViolation(Which which, const std::string& msg) : Error(msg), which_(which) {}
  Which which() const noexcept { return which_; }

 private:
  Which which_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// An integrand returned NaN/inf away from its declared singular points.
class NonFiniteSample : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class SigmaOutOfRange : public Error {
 public:
  using Error::Error;
};

}  // namespace covpair
