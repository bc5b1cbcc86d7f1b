#pragma once

#include <stdexcept>
#include <string>

namespace kpz {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A driving function or its parameters violate a constructor precondition.
struct InvalidSpec : Error {
  using Error::Error;
};

// An argument does not match the spec's dimension.
struct DimensionMismatch : Error {
  using Error::Error;
};

// Coefficient extraction refused because the smoothness probe flagged the
// driving function.
struct NonSmoothDriving : Error {
  using Error::Error;
};

// Per-direction derivative estimates disagree beyond the extrapolation
// residual; the driving function is probably not lattice-symmetric.
struct InconsistentDirections : Error {
  using Error::Error;
};

// The evolution domain has no interior left to update.
struct DomainExhausted : Error {
  using Error::Error;
};

// A pre-flight size estimate exceeded the configured memory cap.
struct SizingError : Error {
  using Error::Error;
};

// A quadrature or refinement loop failed to converge within its budget.
struct QuadratureError : Error {
  using Error::Error;
};

// Axiom validation failed where success was a precondition.
struct ValidationError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace kpz
