#pragma once

#include <stdexcept>
#include <string>

namespace cohres {

// Base class for every typed failure raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameters outside their mathematical domain (s < 0, |gamma| > 1, ...).
struct DomainError : Error {
  using Error::Error;
};

// Configuration produces an invalid model (delta too large, sigma <= 0, ...).
struct ConfigError : Error {
  using Error::Error;
};

// Mean photon number vanishes: no photon ever arrives, bounds undefined.
struct DegenerateStateError : DomainError {
  using DomainError::DomainError;
};

// PSF overlap c -> 1: the two-mode basis construction degenerates.
struct DegenerateOverlapError : DomainError {
  using DomainError::DomainError;
};

// State purity -> 1: the logarithmic-derivative solution divides by 1 - r^2.
struct SingularStateError : DomainError {
  using DomainError::DomainError;
};

// Intensity parameter at q in {0,1}: closed forms for q-derivatives vanish
// or diverge; boundary values must be obtained by limit evaluation.
struct BoundaryError : DomainError {
  using DomainError::DomainError;
};

// Photon-arrival probability at 0 or 1: Bernoulli information undefined.
struct DegeneratePriorError : DomainError {
  using DomainError::DomainError;
};

// d(nbar)/dq ~ (1-2q)/sqrt(q(1-q)) unbounded at the intensity boundary.
struct DerivativeDivergenceError : DomainError {
  using DomainError::DomainError;
};

// Purity-route chart not bijective (gamma_r < 0); carries the stationary
// separation s0 where r(s) attains its minimum.
struct NonBijectiveError : DomainError {
  NonBijectiveError(const std::string& msg, double s0_in)
      : DomainError(msg), s0(s0_in) {}
  double s0 = 0.0;
};

// dr/ds = 0 at the evaluation point: the r -> s chain rule breaks down.
struct SingularJacobianError : DomainError {
  using DomainError::DomainError;
};

// Gram-Schmidt norms for the derivative subspace lost positivity.
struct NumericDegeneracyError : Error {
  using Error::Error;
};

// Truncated mode expansion misses probability mass beyond tolerance.
struct TruncationError : Error {
  TruncationError(const std::string& msg, double achieved_tail)
      : Error(msg), tail(achieved_tail) {}
  double tail = 0.0;
};

// Finite-difference step outside the trusted window, or Richardson
// extrapolation flags rounding-dominated derivatives.
struct StepError : Error {
  using Error::Error;
};

// Scenario/config text could not be parsed; carries the 1-based line number.
struct ParseError : Error {
  ParseError(const std::string& msg, int line_in) : Error(msg), line(line_in) {}
  int line = 0;
};

// Likelihood flat or degenerate: no meaningful estimate exists.
struct EstimationError : Error {
  using Error::Error;
};

}  // namespace cohres
