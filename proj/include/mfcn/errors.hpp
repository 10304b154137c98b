#pragma once

#include <stdexcept>
#include <string>

namespace mfcn {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad n, kappa out of range, ...).
struct ArgumentError : Error {
  using Error::Error;
};

/// A configuration object or config file is inconsistent or incomplete.
struct ConfigError : Error {
  using Error::Error;
};

/// An input file could not be parsed; the message names the line.
struct ParseError : Error {
  using Error::Error;
};

/// Matrix/vector shapes do not match; the message names the step.
struct DimensionError : Error {
  using Error::Error;
};

/// A signal evaluated to a non-finite value; the message names the index.
struct EvaluationError : Error {
  using Error::Error;
};

/// The eigensolver did not converge within its iteration budget.
struct SolverError : Error {
  using Error::Error;
};

/// A polynomial filter was applied outside its fitted spectral domain.
struct DomainError : Error {
  using Error::Error;
};

/// The requested operation has no continuum oracle (nonlinear activation).
struct NotSupportedError : Error {
  using Error::Error;
};

}  // namespace mfcn
