#include "sharpmin/extended.hpp"

#include <cmath>

#include "sharpmin/errors.hpp"

namespace sharpmin {

Extended::Extended(double v) {
  if (std::isnan(v)) throw ArithmeticError("NaN is not an extended real");
  if (v == -std::numeric_limits<double>::infinity())
    throw ArithmeticError("-inf is not representable");
  if (std::isinf(v)) {
    finite_ = false;
  } else {
    value_ = v;
  }
}

double Extended::value() const {
  if (!finite_) throw ArithmeticError("value() on +inf");
  return value_;
}

Extended operator+(Extended a, Extended b) {
  if (!a.finite_ || !b.finite_) return Extended::infinity();
  return Extended(a.value_ + b.value_);
}

Extended operator-(Extended a, Extended b) {
  if (!b.finite_) {
    throw ArithmeticError(a.finite_ ? "finite - inf leaves the extended reals" : "inf - inf");
  }
  if (!a.finite_) return Extended::infinity();
  return Extended(a.value_ - b.value_);
}

std::ostream& operator<<(std::ostream& os, Extended x) {
  if (x.is_infinite()) return os << "inf";
  return os << x.value_;
}

}  // namespace sharpmin
