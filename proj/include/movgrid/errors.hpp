#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace movgrid {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two states (or a state and a target frame) do not share counts/spacings.
class IncompatibleGrid : public Error {
 public:
  using Error::Error;
};

/// Zero or non-finite norm where a normalized expectation is requested.
class DegenerateState : public Error {
 public:
  using Error::Error;
};

/// A model was evaluated outside the region where it is finite.
class ModelDomainError : public Error {
 public:
  using Error::Error;
};

/// A model definition violates its own invariants (mass matrix, gradient).
class ModelDefinitionError : public Error {
 public:
  using Error::Error;
};

/// The operation needs model data (gradient, quadratic expansion) it lacks.
class UnsupportedModel : public Error {
 public:
  using Error::Error;
};

class UnsupportedScheme : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Configuration problem; `line()` is 0 when the error is not tied to a line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace movgrid
