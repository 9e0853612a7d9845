#include "lipnorm/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lipnorm/error.hpp"

namespace lipnorm {

Exponent Exponent::finite(double p) {
  if (!std::isfinite(p) || p < 1.0) {
    throw InputError("exponent must lie in [1, inf], got " + std::to_string(p));
  }
  return Exponent(false, p);
}

double Exponent::value() const {
  if (infinite_) throw InputError("infinite exponent has no finite value");
  return value_;
}

Exponent Exponent::conjugate() const {
  if (infinite_) return finite(1.0);
  if (value_ == 1.0) return infinity();
  if (value_ == 2.0) return finite(2.0);
  return finite(value_ / (value_ - 1.0));
}

bool Exponent::operator==(const Exponent& other) const {
  if (infinite_ || other.infinite_) return infinite_ == other.infinite_;
  // Conjugating twice may move the last bit.
  return std::abs(value_ - other.value_) <= 1e-13 * std::max(1.0, std::abs(value_));
}

std::string Exponent::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os.precision(12);
  os << value_;
  return os.str();
}

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return infinity();
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InputError("cannot parse exponent '" + text + "'");
  }
  if (used != text.size()) throw InputError("cannot parse exponent '" + text + "'");
  return finite(p);
}

}  // namespace lipnorm
