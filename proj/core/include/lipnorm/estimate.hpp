#pragma once

#include <string>

#include "json.hpp"

namespace lipnorm {

using Json = nlohmann::json;

/// Certified bracket [lower, upper] for a norm or supremum.
///
/// `lower_cert` holds witness data that reproduces `lower` when re-evaluated;
/// `upper_cert` holds a representation, dual feasible point or domination
/// certificate whose value is `upper`. Both are plain JSON so they can be
/// stored and re-checked by `certify`. `exact` means the two sides agree to
/// the certified tolerance; `loose` marks an upper bound known to be crude.
struct NormEstimate {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = false;
  bool loose = false;
  std::string quantity;
  Json lower_cert = Json::object();
  Json upper_cert = Json::object();

  double width() const { return upper - lower; }
  double midpoint() const { return 0.5 * (upper + lower); }
  /// Width relative to the midpoint; zero for the zero bracket.
  double relative_width() const;
  bool contains(double value, double tol = 1e-9) const;
  bool overlaps(const NormEstimate& other, double tol = 1e-9) const;

  /// Both sides zero.
  static NormEstimate zero(std::string quantity);
};

/// Tolerance for certified-exact computations.
inline constexpr double kExactTol = 1e-9;

/// Brackets produced by search are accepted at this relative width.
inline constexpr double kSearchRelWidth = 0.05;

Json to_json(const NormEstimate& e);
NormEstimate estimate_from_json(const Json& j);

}  // namespace lipnorm
