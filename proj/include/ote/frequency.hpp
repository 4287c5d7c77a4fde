#pragma once

#include "ote/types.hpp"

namespace ote {

// A point on the positive real axis (omega) or the positive imaginary axis (i xi).
class Frequency {
 public:
  static Frequency real(double omega) { return Frequency(omega, false); }
  static Frequency imaginary(double xi) { return Frequency(xi, true); }

  bool is_imaginary() const { return imaginary_; }
  bool is_static() const { return imaginary_ && value_ == 0.0; }
  // omega for real frequencies, xi for imaginary ones
  double value() const { return value_; }
  cplx omega() const { return imaginary_ ? cplx(0.0, value_) : cplx(value_, 0.0); }
  cplx k0() const { return omega() / phys::c; }

  bool operator==(const Frequency&) const = default;

 private:
  Frequency(double v, bool imag) : value_(v), imaginary_(imag) {}
  double value_;
  bool imaginary_;
};

}  // namespace ote
