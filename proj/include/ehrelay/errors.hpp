#pragma once

#include <stdexcept>
#include <string>

namespace ehrelay {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failures. The CLI maps these to exit code 4.
class NumericError : public Error {
 public:
  using Error::Error;
};

class NonConvergent : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateRates : public NumericError {
 public:
  using NumericError::NumericError;
};

class ZeroProbability : public NumericError {
 public:
  using NumericError::NumericError;
};

// Input validation failures. The CLI maps these to exit code 3.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InvalidDomain : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DegenerateTheta : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidMode : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class OutOfRange : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Command line misuse. The CLI maps this to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ehrelay
