#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sharpmin {

/// Malformed or invariant-violating input (files, constructor arguments).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arithmetic that leaves the extended reals, e.g. inf - inf.
class ArithmeticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The dual grid is narrower than the largest difference quotient of the
/// primal data; carries the per-axis half-widths that would be accepted.
class DualRangeError : public std::runtime_error {
 public:
  DualRangeError(const std::string& what, std::vector<double> required)
      : std::runtime_error(what), required_(std::move(required)) {}
  const std::vector<double>& required() const noexcept { return required_; }

 private:
  std::vector<double> required_;
};

/// Independent characterizations disagreed beyond tolerance.
class CharacterizationMismatch : public std::runtime_error {
 public:
  CharacterizationMismatch(const std::string& what, double modulus, double slope_infimum,
                           double tilt_radius)
      : std::runtime_error(what),
        modulus_(modulus),
        slope_infimum_(slope_infimum),
        tilt_radius_(tilt_radius) {}
  double modulus() const noexcept { return modulus_; }
  double slope_infimum() const noexcept { return slope_infimum_; }
  double tilt_radius() const noexcept { return tilt_radius_; }

 private:
  double modulus_;
  double slope_infimum_;
  double tilt_radius_;
};

}  // namespace sharpmin
