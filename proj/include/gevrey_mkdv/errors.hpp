#pragma once

#include <stdexcept>
#include <string>

namespace gmkdv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed arguments: length mismatches, grid mismatches, bad parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A field claimed to be real carries non-Hermitian coefficients.
class RealnessError : public Error {
 public:
  using Error::Error;
};

/// A weight or multiplier left the representable range of the scalar type.
class OverflowError : public Error {
 public:
  OverflowError(const std::string& what, double xi)
      : Error(what), xi_(xi) {}
  double xi() const { return xi_; }

 private:
  double xi_;
};

/// The evolution produced NaN/Inf.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// The nonlinear step-size bound dt <= 0.5 dx / max|u|^2 was violated.
class CflError : public Error {
 public:
  CflError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// A computed result failed one of its self-checks (gate, halving test).
class UntrustedResult : public Error {
 public:
  using Error::Error;
};

}  // namespace gmkdv
