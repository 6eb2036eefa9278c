#pragma once

#include <compare>
#include <limits>
#include <ostream>

namespace sharpmin {

/// A value in R ∪ {+inf}. +inf sorts above every real and absorbs addition.
/// Subtracting +inf is never defined here and throws ArithmeticError.
class Extended {
 public:
  constexpr Extended() = default;
  /// Accepts any finite double or +inf; NaN and -inf throw.
  Extended(double v);  // NOLINT(google-explicit-constructor)

  static constexpr Extended infinity() { return Extended(Tag{}); }

  constexpr bool is_finite() const { return finite_; }
  constexpr bool is_infinite() const { return !finite_; }

  /// The finite value; throws ArithmeticError on +inf.
  double value() const;
  /// The value as a double, +inf mapped to std::numeric_limits<double>::infinity().
  constexpr double raw() const {
    return finite_ ? value_ : std::numeric_limits<double>::infinity();
  }

  friend Extended operator+(Extended a, Extended b);
  friend Extended operator-(Extended a, Extended b);

  friend constexpr bool operator==(Extended a, Extended b) { return a.raw() == b.raw(); }
  friend constexpr std::partial_ordering operator<=>(Extended a, Extended b) {
    return a.raw() <=> b.raw();
  }

  friend std::ostream& operator<<(std::ostream& os, Extended x);

 private:
  struct Tag {};
  constexpr explicit Extended(Tag) : value_(0.0), finite_(false) {}

  double value_ = 0.0;
  bool finite_ = true;
};

}  // namespace sharpmin
