// Exception hierarchy shared by all decoh modules.
#pragma once

#include <stdexcept>
#include <string>

namespace decoh {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A weighted integral diverges at omega -> 0 (pre-screen failed).
class IrDivergentError : public Error {
 public:
  using Error::Error;
};

// The spectral profile has no usable high-frequency decay.
class CutoffMissingError : public Error {
 public:
  using Error::Error;
};

// A tabulated profile's small-omega slope cannot be estimated reliably.
class IndeterminateError : public Error {
 public:
  using Error::Error;
};

// Requested evaluation time is outside the supported oscillatory range.
class OscillationOverflowError : public Error {
 public:
  using Error::Error;
};

// Two field vectors live on different frequency grids.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

// Inverse temperature must be strictly positive.
class BetaNonPositiveError : public Error {
 public:
  using Error::Error;
};

// The Hamiltonian is not bounded below for the requested coupling.
class UnboundedError : public Error {
 public:
  using Error::Error;
};

// A dense eigensolve failed to converge.
class EigenFailureError : public Error {
 public:
  using Error::Error;
};

// A fit window has too few samples or no usable extent.
class WindowTooShortError : public Error {
 public:
  using Error::Error;
};

// Momentum intervals overlap where disjoint intervals are required.
class IntervalsOverlapError : public Error {
 public:
  using Error::Error;
};

// Evaluation requested directly on the spectral cut.
class OnCutError : public Error {
 public:
  using Error::Error;
};

// Scenario/configuration input is invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A numerical routine failed to reach its accuracy target.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace decoh
