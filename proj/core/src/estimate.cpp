#include "lipnorm/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace lipnorm {

double NormEstimate::relative_width() const {
  const double mid = midpoint();
  if (mid <= 0.0) return width() <= kExactTol ? 0.0 : INFINITY;
  return width() / mid;
}

bool NormEstimate::contains(double value, double tol) const {
  return value >= lower - tol && value <= upper + tol;
}

bool NormEstimate::overlaps(const NormEstimate& other, double tol) const {
  return std::max(lower, other.lower) <= std::min(upper, other.upper) + tol;
}

NormEstimate NormEstimate::zero(std::string quantity) {
  NormEstimate e;
  e.exact = true;
  e.quantity = std::move(quantity);
  e.lower_cert = {{"type", "zero"}};
  e.upper_cert = {{"type", "zero"}};
  return e;
}

Json to_json(const NormEstimate& e) {
  Json j;
  j["quantity"] = e.quantity;
  j["lower"] = e.lower;
  j["upper"] = e.upper;
  j["exact"] = e.exact;
  j["loose"] = e.loose;
  j["certificates"] = {{"lower", e.lower_cert}, {"upper", e.upper_cert}};
  return j;
}

NormEstimate estimate_from_json(const Json& j) {
  NormEstimate e;
  e.quantity = j.value("quantity", "");
  e.lower = j.at("lower").get<double>();
  e.upper = j.at("upper").get<double>();
  e.exact = j.value("exact", false);
  e.loose = j.value("loose", false);
  if (j.contains("certificates")) {
    e.lower_cert = j["certificates"].value("lower", Json::object());
    e.upper_cert = j["certificates"].value("upper", Json::object());
  }
  return e;
}

}  // namespace lipnorm
