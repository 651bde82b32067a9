#pragma once

#include <stdexcept>
#include <string>

namespace pattern_gauge {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A constructor or operation received a parameter outside its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A parametrization is degenerate (vanishing speed) at the requested parameter.
class DegenerateParametrizationError : public Error {
 public:
  using Error::Error;
};

class MeshingError : public Error {
 public:
  using Error::Error;
};

/// Inputs that must describe the same mesh (fields, curvature samples, matrices) do not.
class MismatchError : public Error {
 public:
  using Error::Error;
};

class FactorizationError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class NonFiniteFieldError : public Error {
 public:
  using Error::Error;
};

class SingularJacobianError : public Error {
 public:
  using Error::Error;
};

class UnboundedSupremumError : public Error {
 public:
  using Error::Error;
};

/// A check requiring a non-constant steady state was handed a constant one.
class NotAPatternError : public Error {
 public:
  using Error::Error;
};

/// A check needs a simple principal eigenvalue and the computed one is numerically double.
class DegenerateSpectrumError : public Error {
 public:
  using Error::Error;
};

class ConvexityRequiredError : public Error {
 public:
  using Error::Error;
};

/// Scenario configuration could not be parsed; the message carries the field path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pattern_gauge
