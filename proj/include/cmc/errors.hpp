#pragma once

#include <stdexcept>
#include <string>

namespace cmc {

/// Malformed arguments: bad sizes, unsorted grids, out-of-range counts.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A deformation parameter outside the family's [t_min, t_max].
class ParameterRangeError : public InputError {
 public:
  using InputError::InputError;
};

/// The requested domain does not exist on the surface (e.g. a sphere cap past the pole).
class GeometryError : public InputError {
 public:
  using InputError::InputError;
};

/// An iteration failed to converge. Carries the last residual seen.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Computed eigencurves contradict a property the family guarantees.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cmc
