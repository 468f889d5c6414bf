#pragma once

#include <stdexcept>
#include <string>

namespace sdeest {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (t <= 0, alpha <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Squared diffusion B(beta, x) is not strictly positive.
class EllipticityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A computation produced NaN or Inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Simulated state left the |x| <= 1e12 envelope.
class ExplosionError : public Error {
 public:
  using Error::Error;
};

/// Matrix failed the determinant test of a Newton-type update.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sdeest
