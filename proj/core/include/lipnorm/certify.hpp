#pragma once

#include <string>
#include <vector>

#include "lipnorm/estimate.hpp"
#include "lipnorm/lipmap.hpp"
#include "lipnorm/tensor.hpp"

namespace lipnorm {

/// The object an estimate was computed for, in a form `certify` can reload:
/// {"kind": "free_vector" | "tensor" | "operator" | "lipschitz_map",
///  "object": ...}.
Json subject_json(const FreeVector& m);
Json subject_json(const TensorElement& u);
Json subject_json(const LinearOperator& u);
Json subject_json(const LipschitzMap& T);

/// Outcome of re-verifying certificates. `residual` is the largest relative
/// violation found: a feasibility defect, or a certificate whose recomputed
/// value falls short of the claimed bound.
struct CertificateCheck {
  bool ok = true;
  double residual = 0.0;
  int checked = 0;
  std::vector<std::string> failures;

  void merge(const CertificateCheck& other);
};

/// Certificates must re-verify with residual below this.
inline constexpr double kCertifyTol = 1e-9;

/// Recomputes both certificates of `e` from scratch against `subject` and
/// compares them with the claimed lower and upper bounds.
CertificateCheck verify_estimate(const NormEstimate& e, const Json& subject);

}  // namespace lipnorm
