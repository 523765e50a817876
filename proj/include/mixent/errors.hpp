#pragma once

#include <stdexcept>
#include <string>

namespace mixent {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed user input: bad pmf, bad density parameters, bad spec file.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// Spec-file parse failure; carries field/line context in the message.
class ParseError : public InvalidArgumentError {
 public:
  using InvalidArgumentError::InvalidArgumentError;
};

// An integral whose tail estimate keeps growing past the truncation radius.
class DivergentIntegralError : public Error {
 public:
  using Error::Error;
};

// posterior weights requested at a point where the marginal density is zero.
class UndefinedPosteriorError : public Error {
 public:
  using Error::Error;
};

// mixed entropy requested without a passing goodness certificate.
class UncertifiedError : public Error {
 public:
  using Error::Error;
};

// stationary distribution of a reducible chain is not unique.
class ReducibleChainError : public Error {
 public:
  using Error::Error;
};

// finite-horizon chain entropy requires a stationary initial distribution.
class NonStationaryError : public Error {
 public:
  using Error::Error;
};

// A map region that cannot be inverted (zero derivative, overlapping images).
class NonInvertibleError : public Error {
 public:
  using Error::Error;
};

// Sample-based estimator given degenerate input (all values equal, too few).
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

}  // namespace mixent
