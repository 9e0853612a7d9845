#pragma once

#include <string>

namespace lipnorm {

/// Exponent p in [1, infinity]. Infinity is a distinct state, not a large float.
class Exponent {
 public:
  static Exponent finite(double p);
  static Exponent infinity() { return Exponent(); }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  /// Finite value; throws InputError when infinite.
  double value() const;

  /// 1/p + 1/p* = 1.
  Exponent conjugate() const;

  bool operator==(const Exponent& other) const;

  bool is(double p) const { return !infinite_ && value_ == p; }

  /// "2", "1.5", "inf".
  std::string to_string() const;
  /// Accepts decimals and "inf"/"infinity".
  static Exponent parse(const std::string& text);

 private:
  Exponent() : infinite_(true), value_(0.0) {}
  Exponent(bool inf, double v) : infinite_(inf), value_(v) {}

  bool infinite_;
  double value_;
};

}  // namespace lipnorm
