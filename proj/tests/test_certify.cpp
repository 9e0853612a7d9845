#include <gtest/gtest.h>

#include <vector>

#include "lipnorm/certify.hpp"
#include "lipnorm/error.hpp"
#include "lipnorm/free_space.hpp"
#include "lipnorm/json_io.hpp"
#include "lipnorm/optim.hpp"
#include "lipnorm/random_instances.hpp"
#include "lipnorm/summing.hpp"

using namespace lipnorm;

namespace {

const Exponent kTwo = Exponent::finite(2.0);

SummingOptions fast() {
  SummingOptions o;
  o.restarts = 8;
  return o;
}

TensorOptions fast_tensor() {
  TensorOptions o;
  o.restarts = 8;
  return o;
}

struct Case {
  NormEstimate estimate;
  Json subject;
};

std::vector<Case> sample_cases() {
  Rng rng = make_rng(51);
  const auto X = instances::random_space(rng, 4);
  const FinNormedSpace E(2, kTwo);
  const LipschitzMap T = instances::random_map(rng, X, E);
  const LinearOperator u = linearize(T);
  const TensorElement t = instances::random_tensor(rng, X, E, 2);
  const FreeVector m(X, gaussian_vector(rng, X->free_dim()));
  return {
      {ae_norm(m).estimate, subject_json(m)},
      {T.lip_estimate(), subject_json(T)},
      {op_norm(u), subject_json(u)},
      {pi_norm(u, kTwo, fast()), subject_json(u)},
      {pi_norm(u, Exponent::finite(3.0), fast()), subject_json(u)},
      {strongly_p_summing_norm(u, kTwo, fast()), subject_json(u)},
      {strictly_lip_p_summing_norm(T, kTwo, fast()), subject_json(T)},
      {lip_p_summing_norm(T, kTwo, fast()), subject_json(T)},
      {lip_cohen_strongly_p_summing_norm(T, kTwo, fast()), subject_json(T)},
      {proj_norm_l(t, fast_tensor()), subject_json(t)},
      {inj_norm_l(t, fast_tensor()), subject_json(t)},
      {dp_norm_l(t, kTwo, fast_tensor()), subject_json(t)},
      {gp_norm_l(t, kTwo, fast_tensor()), subject_json(t)},
      {mu_norm(t, kTwo, fast_tensor()), subject_json(t)},
      {cs_norm(t, kTwo, fast_tensor()), subject_json(t)},
  };
}

const std::vector<Case>& cases() {
  static const std::vector<Case> c = sample_cases();
  return c;
}

}  // namespace

TEST(Certify, EveryEstimatorVerifies) {
  for (const auto& c : cases()) {
    const CertificateCheck r = verify_estimate(c.estimate, c.subject);
    EXPECT_TRUE(r.ok) << c.estimate.quantity << ": " << (r.failures.empty() ? "" : r.failures.front());
    EXPECT_LT(r.residual, kCertifyTol) << c.estimate.quantity;
    EXPECT_EQ(r.checked, 2) << c.estimate.quantity;
  }
}

TEST(Certify, SurvivesJsonRoundTrip) {
  for (const auto& c : cases()) {
    const Json text = Json::parse(dump_deterministic(to_json(c.estimate)));
    const Json subject = Json::parse(dump_deterministic(c.subject));
    EXPECT_TRUE(verify_estimate(estimate_from_json(text), subject).ok) << c.estimate.quantity;
  }
}

TEST(Certify, RejectsAnInflatedLowerBound) {
  for (const auto& c : cases()) {
    if (c.estimate.upper <= 0.0) continue;
    NormEstimate e = c.estimate;
    e.lower *= 1.01;
    e.lower_cert["value"] = e.lower;
    const CertificateCheck r = verify_estimate(e, c.subject);
    EXPECT_FALSE(r.ok) << e.quantity;
    EXPECT_GT(r.residual, kCertifyTol) << e.quantity;
  }
}

TEST(Certify, RejectsADeflatedUpperBound) {
  for (const auto& c : cases()) {
    if (c.estimate.upper <= 0.0) continue;
    NormEstimate e = c.estimate;
    e.upper *= 0.99;
    e.upper_cert["value"] = e.upper;
    EXPECT_FALSE(verify_estimate(e, c.subject).ok) << e.quantity;
  }
}

TEST(Certify, RejectsTheWrongSubject) {
  Rng rng = make_rng(52);
  const auto X = instances::random_space(rng, 4);
  const LipschitzMap T = instances::random_map(rng, X, FinNormedSpace(2, kTwo));
  const LipschitzMap S = instances::random_map(rng, X, FinNormedSpace(2, kTwo));
  const NormEstimate e = pi_norm(linearize(T), kTwo, fast());
  EXPECT_TRUE(verify_estimate(e, subject_json(linearize(T))).ok);
  EXPECT_FALSE(verify_estimate(e, subject_json(linearize(S))).ok);
}

TEST(Certify, RejectsUnknownAndMissingCertificates) {
  NormEstimate e = cases().front().estimate;
  e.upper_cert = {{"type", "trust_me"}, {"value", e.upper}};
  EXPECT_FALSE(verify_estimate(e, cases().front().subject).ok);
  e = cases().front().estimate;
  e.lower_cert = Json::object();
  EXPECT_FALSE(verify_estimate(e, cases().front().subject).ok);
}

TEST(Certify, ZeroEstimateOfTheZeroMap) {
  const auto X = instances::line_space(3);
  const LipschitzMap Z = LipschitzMap::zero(X, FinNormedSpace(2, kTwo));
  for (const NormEstimate& e : {pi_norm(linearize(Z), kTwo, fast()), strictly_lip_p_summing_norm(Z, kTwo, fast()),
                                lip_p_summing_norm(Z, kTwo, fast())}) {
    EXPECT_EQ(e.upper, 0.0);
    EXPECT_TRUE(verify_estimate(e, subject_json(Z)).ok) << e.quantity;
  }
  const NormEstimate zero = NormEstimate::zero("pi_2");
  EXPECT_TRUE(verify_estimate(zero, subject_json(linearize(Z))).ok);
  Rng rng = make_rng(53);
  const LipschitzMap T = instances::random_map(rng, X, FinNormedSpace(2, kTwo));
  EXPECT_FALSE(verify_estimate(zero, subject_json(linearize(T))).ok);
}

TEST(Certify, TightMetricsSurvivePrintedPrecision) {
  // Shortest-path metrics have exact triangle equalities, which printing at
  // 12 significant digits can break in the last digit.
  int broken = 0;
  for (unsigned long long s = 0; s < 20; ++s) {
    Rng rng = make_rng(54, s);
    const PointedMetricSpace X = instances::repaired_metric(rng, 8);
    const Json text = Json::parse(dump_deterministic(space_json(X)));
    const auto rows = text.at("dist").get<std::vector<std::vector<double>>>();
    Matrix printed(8, 8);
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) printed(i, j) = rows[i][j];
    }
    broken += validate_metric(printed, 8).empty() ? 0 : 1;
    const PointedMetricSpace Y = parse_space(text);
    EXPECT_LE((Y.distances() - X.distances()).cwiseAbs().maxCoeff(), 1e-10);
  }
  EXPECT_GT(broken, 0);  // the case does occur
}

TEST(Certify, LoaderStillRejectsRealViolations) {
  const Json bad = {{"points", {"0", "a", "b"}}, {"dist", {{0, 1, 2 + 1e-6}, {1, 0, 1}, {2 + 1e-6, 1, 0}}}};
  EXPECT_THROW(parse_space(bad), InputError);
}
