#pragma once

#include <stdexcept>
#include <string>

namespace crowdsense {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (e.g. a probability
/// outside [0,1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Shapes of matrices or vectors do not agree.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// The requested constraint cannot be met by any policy.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied object breaks a documented contract (e.g. a payment
/// integrand that is not strictly convex).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace crowdsense
