#include <gtest/gtest.h>

#include <cmath>

#include "lipnorm/error.hpp"
#include "lipnorm/free_space.hpp"
#include "lipnorm/optim.hpp"
#include "lipnorm/random_instances.hpp"
#include "lipnorm/tensor.hpp"
#include "oracles.hpp"

using namespace lipnorm;

namespace {

const Exponent kTwo = Exponent::finite(2.0);

TensorOptions fast(unsigned long long seed) {
  TensorOptions o;
  o.seed = seed;
  o.restarts = 16;
  return o;
}

std::vector<NormEstimate> all_six(const TensorElement& u, Exponent p, const TensorOptions& o) {
  return {proj_norm_l(u, o), inj_norm_l(u, o), dp_norm_l(u, p, o),
          gp_norm_l(u, p, o), mu_norm(u, p, o), cs_norm(u, p, o)};
}

}  // namespace

TEST(Tensor, PhiCollectsTermsIntoTheCanonicalMatrix) {
  const auto X = instances::line_space(2);
  const FinNormedSpace E(2, kTwo);
  const TensorElement u(X, E, {{1, 2, Vector::Unit(2, 0)}, {2, 0, Vector::Unit(2, 1)}});
  // delta_1 - delta_2 tensor e_1 plus delta_2 tensor e_2, in coordinates (1, 2).
  const Matrix M = phi(u).matrix;
  ASSERT_EQ(M.rows(), 2);
  ASSERT_EQ(M.cols(), 2);
  Matrix want(2, 2);
  want << 1, 0, -1, 1;
  EXPECT_LE((M - want).cwiseAbs().maxCoeff(), 1e-15);
  const TensorElement v = TensorElement::from_matrix(X, E, M);
  EXPECT_LE((phi(v).matrix - M).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Tensor, PairingWithAMapIsTermwise) {
  Rng rng = make_rng(31);
  const auto X = instances::random_space(rng, 4);
  const FinNormedSpace E(3, kTwo);
  const LipschitzMap T = instances::random_map(rng, X, E);
  const TensorElement u = instances::random_tensor(rng, X, E, 3);
  double want = 0.0;
  for (const auto& t : u.terms()) want += (T.value(t.x) - T.value(t.y)).dot(t.e);
  EXPECT_NEAR(pair_with_map(T, u), want, 1e-12);
}

TEST(Tensor, CrossNormAxiomOnSingleTerms) {
  Rng rng = make_rng(32);
  for (int t = 0; t < 12; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 2, 4));
    const FinNormedSpace E(instances::uniform_int(rng, 1, 3), kTwo);
    const TensorElement u = instances::random_tensor(rng, X, E, 1);
    const auto& term = u.terms().front();
    const double want = X->distance(term.x, term.y) * E.norm(term.e);
    for (const auto& e : all_six(u, kTwo, fast(static_cast<unsigned long long>(t)))) {
      EXPECT_TRUE(e.contains(want, 1e-6)) << e.quantity << " [" << e.lower << ", " << e.upper << "] vs " << want;
    }
  }
}

TEST(Tensor, ScalarFactorReducesToTheFreeSpaceNorm) {
  // With E one-dimensional every Lipschitz cross-norm is the Arens-Eells norm
  // of the underlying free vector.
  Rng rng = make_rng(33);
  const FinNormedSpace R(1, kTwo);
  for (int t = 0; t < 8; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 2, 5));
    const TensorElement u = instances::random_tensor(rng, X, R, 3);
    const FreeVector m(X, phi(u).matrix.col(0));
    const double want = ae_norm(m).estimate.upper;
    for (const auto& e : all_six(u, kTwo, fast(static_cast<unsigned long long>(t)))) {
      EXPECT_TRUE(e.contains(want, 1e-6)) << e.quantity << " [" << e.lower << ", " << e.upper << "] vs " << want;
    }
  }
}

TEST(Tensor, InjectiveBelowProjective) {
  Rng rng = make_rng(34);
  for (int t = 0; t < 8; ++t) {
    const auto X = instances::random_space(rng, 3);
    const FinNormedSpace E(2, kTwo);
    const TensorElement u = instances::random_tensor(rng, X, E, 2);
    const auto o = fast(static_cast<unsigned long long>(t));
    const NormEstimate inj = inj_norm_l(u, o), pro = proj_norm_l(u, o);
    const NormEstimate dp = dp_norm_l(u, kTwo, o), gp = gp_norm_l(u, kTwo, o);
    EXPECT_LE(inj.lower, pro.upper + 1e-9);
    EXPECT_LE(inj.lower, dp.upper + 1e-9);
    EXPECT_LE(dp.lower, pro.upper + 1e-9);
    EXPECT_LE(inj.lower, gp.upper + 1e-9);
    EXPECT_LE(gp.lower, pro.upper + 1e-9);
    // A molecule representation is a representation: g_p <= mu_p.
    EXPECT_LE(gp.lower, mu_norm(u, kTwo, o).upper + 1e-9);
  }
}

TEST(Tensor, PairingBoundedByLipTimesProjective) {
  Rng rng = make_rng(35);
  for (int t = 0; t < 10; ++t) {
    const auto X = instances::random_space(rng, 4);
    const FinNormedSpace E(2, kTwo);
    const LipschitzMap T = instances::random_map(rng, X, E);
    const TensorElement u = instances::random_tensor(rng, X, E, 3);
    const NormEstimate pro = proj_norm_l(u, fast(1));
    EXPECT_LE(std::abs(pair_with_map(T, u)), T.lip_constant() * pro.upper * (1 + 1e-9));
  }
}

TEST(Tensor, HomogeneityOfBrackets) {
  Rng rng = make_rng(36);
  const auto X = instances::random_space(rng, 3);
  const FinNormedSpace E(2, kTwo);
  const TensorElement u = instances::random_tensor(rng, X, E, 2);
  const NormEstimate a = inj_norm_l(u, fast(2)), b = inj_norm_l(u * -3.0, fast(2));
  EXPECT_NEAR(b.upper, 3.0 * a.upper, 1e-9);
  EXPECT_EQ(proj_norm_l(u * 0.0, fast(2)).upper, 0.0);
}

TEST(Tensor, NonEuclideanFactorsStayValid) {
  Rng rng = make_rng(37);
  const auto X = instances::random_space(rng, 3);
  for (Exponent q : {Exponent::finite(1.0), Exponent::infinity()}) {
    const FinNormedSpace E(2, q);
    const TensorElement u = instances::random_tensor(rng, X, E, 1);
    const auto& term = u.terms().front();
    const double want = X->distance(term.x, term.y) * E.norm(term.e);
    EXPECT_TRUE(proj_norm_l(u, fast(3)).contains(want, 1e-6));
    EXPECT_TRUE(inj_norm_l(u, fast(3)).contains(want, 1e-6));
  }
}

TEST(Tensor, CapacityCap) {
  const auto X = instances::line_space(static_cast<int>(kMaxVertexPoints));
  const FinNormedSpace E(1, kTwo);
  const TensorElement u(X, E, {{1, 0, Vector::Ones(1)}});
  EXPECT_THROW(dp_norm_l(u, kTwo), CapacityError);
  EXPECT_THROW(mu_norm(u, kTwo), CapacityError);
  // The injective and projective norms have routes that avoid the ball.
  EXPECT_TRUE(inj_norm_l(u).contains(1.0, 1e-6));
  EXPECT_TRUE(proj_norm_l(u).contains(1.0, 1e-6));
}

TEST(Tensor, CrossNormNamesRoundTrip) {
  for (CrossNorm k : {CrossNorm::Projective, CrossNorm::Injective, CrossNorm::Dp, CrossNorm::Gp,
                      CrossNorm::Mu, CrossNorm::Cs}) {
    EXPECT_EQ(parse_cross_norm(to_string(k)), k);
  }
  EXPECT_THROW(parse_cross_norm("nope"), InputError);
}
