#pragma once

#include <stdexcept>
#include <string>

namespace cyclic {

// Base of every error thrown by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation, or an input that
// violates a documented precondition (dimension mismatch, bad flag value).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A truncation or quadrature could not certify the requested tolerance, or a
// linear system was singular.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cyclic
