#pragma once

#include <stdexcept>
#include <string>

namespace pauli2d {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry / meshing
class MeshFailure : public Error {
 public:
  using Error::Error;
};
class NonSimplePolygon : public Error {
 public:
  using Error::Error;
};
class EmptyRegion : public Error {
 public:
  using Error::Error;
};

// Field catalog
class UnknownField : public Error {
 public:
  using Error::Error;
};
class MissingParam : public Error {
 public:
  using Error::Error;
};
class NoAnalyticPotential : public Error {
 public:
  using Error::Error;
};

// Linear algebra / eigensolvers
class SingularSystem : public Error {
 public:
  using Error::Error;
};
class FactorizationFailure : public Error {
 public:
  using Error::Error;
};
class NoConvergence : public Error {
 public:
  using Error::Error;
};
class UnderflowDominates : public Error {
 public:
  using Error::Error;
};

// Level sets / curves
class EmptyLevel : public Error {
 public:
  using Error::Error;
};
class OpenCurve : public Error {
 public:
  using Error::Error;
};

// Argument / configuration validation
class InvalidArgument : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace pauli2d
