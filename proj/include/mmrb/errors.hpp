#pragma once

#include <stdexcept>
#include <string>

namespace mmrb {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid run configuration (degenerate mesh, bad counts, unknown preset).
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Physically inadmissible model data (negative cross section, nonpositive Theta).
class ModelError : public Error {
public:
  using Error::Error;
};

/// A discretization requirement is violated (cross-moment condition, K > 0).
class SchemeError : public Error {
public:
  using Error::Error;
};

/// Iterative solver failed to converge; carries the final residual in the message.
class SolverError : public Error {
public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_norm(residual) {}
  double residual_norm;
};

/// Dense factorization or orthonormality loss in the reduced model.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Snapshot set spans only the zero vector; no basis can be built.
class DegenerateBasisError : public Error {
public:
  using Error::Error;
};

} // namespace mmrb
