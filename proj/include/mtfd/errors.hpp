#pragma once

#include <stdexcept>
#include <string>

namespace mtfd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidOrder : public Error {
 public:
  using Error::Error;
};

class GridMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidContour : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a special function or transform.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Elliptic coefficients violate positivity/ellipticity.
class CoefficientError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent user-supplied configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure inside a solver or iteration.
class SolverError : public Error {
 public:
  using Error::Error;
};

class DegenerateDirection : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace mtfd
