#pragma once

#include <stdexcept>
#include <string>

namespace qes {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter is out of its admissible range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// The input does not admit a QES construction (sign condition, zeros, monotonicity).
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A function returned a non-finite value where a finite one was required.
class NonFiniteError : public Error {
 public:
  NonFiniteError(const std::string& what, double abscissa)
      : Error(what + " at x=" + std::to_string(abscissa)), abscissa_(abscissa) {}

  double abscissa() const noexcept { return abscissa_; }

 private:
  double abscissa_;
};

}  // namespace qes
