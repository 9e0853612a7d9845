#include <gtest/gtest.h>

#include <cmath>

#include "lipnorm/certify.hpp"
#include "lipnorm/optim.hpp"
#include "lipnorm/random_instances.hpp"
#include "lipnorm/summing.hpp"
#include "oracles.hpp"

using namespace lipnorm;

namespace {

const Exponent kTwo = Exponent::finite(2.0);

SummingOptions fast(unsigned long long seed) {
  SummingOptions o;
  o.seed = seed;
  o.restarts = 16;
  return o;
}

void expect_certified(const NormEstimate& e, const Json& subject) {
  const CertificateCheck c = verify_estimate(e, subject);
  EXPECT_TRUE(c.ok) << e.quantity << ": " << (c.failures.empty() ? "" : c.failures.front());
  EXPECT_LT(c.residual, kCertifyTol);
}

}  // namespace

TEST(OpNorm, MatchesClosedForms) {
  Rng rng = make_rng(41);
  for (int t = 0; t < 10; ++t) {
    const Matrix a = gaussian_matrix(rng, 3, 4);
    // l_2 -> l_2: largest singular value.
    const auto u2 = LinearOperator::on_normed(FinNormedSpace(4, kTwo), FinNormedSpace(3, kTwo), a);
    EXPECT_NEAR(op_norm(u2).upper, oracle::spectral(a), 1e-9);
    EXPECT_NEAR(op_norm(u2).lower, oracle::spectral(a), 1e-9);
    // l_1 -> l_2: largest column norm.
    const auto u1 = LinearOperator::on_normed(FinNormedSpace(4, Exponent::finite(1.0)),
                                              FinNormedSpace(3, kTwo), a);
    EXPECT_NEAR(op_norm(u1).upper, a.colwise().norm().maxCoeff(), 1e-12);
    // l_2 -> l_inf: largest row norm.
    const auto ui = LinearOperator::on_normed(FinNormedSpace(4, kTwo),
                                              FinNormedSpace(3, Exponent::infinity()), a);
    EXPECT_NEAR(op_norm(ui).upper, a.rowwise().norm().maxCoeff(), 1e-9);
    expect_certified(op_norm(ui), subject_json(ui));
  }
}

TEST(PiNorm, HilbertSchmidtOnEuclideanSpaces) {
  Rng rng = make_rng(42);
  for (int t = 0; t < 10; ++t) {
    const Matrix a = gaussian_matrix(rng, 3, 3);
    const auto u = LinearOperator::on_normed(FinNormedSpace(3, kTwo), FinNormedSpace(3, kTwo), a);
    const NormEstimate e = pi_norm(u, kTwo, fast(1));
    EXPECT_TRUE(e.contains(oracle::hilbert_schmidt(a), 1e-9));
    expect_certified(e, subject_json(u));
  }
}

TEST(PiNorm, IdentityOfAnNDimensionalSpaceIsRootN) {
  // pi_2(id_E) = sqrt(dim E) for every finite-dimensional normed space E.
  for (int n = 1; n <= 3; ++n) {
    for (Exponent q : {Exponent::finite(1.0), kTwo, Exponent::infinity()}) {
      const FinNormedSpace E(n, q);
      const auto id = LinearOperator::on_normed(E, E, Matrix::Identity(n, n));
      const NormEstimate e = pi_norm(id, kTwo, fast(2));
      EXPECT_TRUE(e.contains(std::sqrt(n), 1e-6)) << n << " " << q.to_string() << " [" << e.lower << ", "
                                                  << e.upper << "]";
      expect_certified(e, subject_json(id));
    }
  }
}

TEST(PiNorm, RankOneIsProductOfNorms) {
  Rng rng = make_rng(43);
  for (int t = 0; t < 6; ++t) {
    const auto X = instances::random_space(rng, 4);
    const auto f = LipschitzFunctional::from_coords(X, gaussian_vector(rng, X->free_dim()));
    const Vector e = gaussian_vector(rng, 2);
    const LipschitzMap T = LipschitzMap::rank_one(f, e, FinNormedSpace(2, kTwo));
    const double want = f.lip_constant() * e.norm();
    const LinearOperator u = linearize(T);
    for (double p : {1.5, 2.0, 3.0}) {
      const NormEstimate est = pi_norm(u, Exponent::finite(p), fast(3));
      EXPECT_TRUE(est.contains(want, 1e-6)) << p << " [" << est.lower << ", " << est.upper << "] vs " << want;
    }
  }
}

TEST(PiNorm, DominatesOperatorNormAndEverySequenceRatio) {
  Rng rng = make_rng(44);
  for (int t = 0; t < 8; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 3, 5));
    const LipschitzMap T = instances::random_map(rng, X, FinNormedSpace(2, kTwo));
    const LinearOperator u = linearize(T);
    const NormEstimate pi = pi_norm(u, kTwo, fast(4));
    EXPECT_GE(pi.upper, op_norm(u).upper - 1e-9);
    for (int s = 0; s < 5; ++s) {
      const Matrix seq = gaussian_matrix(rng, X->free_dim(), 4);
      EXPECT_LE(sequence_ratio(u, seq, kTwo), pi.upper * (1 + 1e-9));
    }
  }
}

TEST(Lipschitz, DiracOfTheLineGrowsLikeRootN) {
  // Pi_2^SL(delta_X) = pi_2(id of F(X)) = sqrt(dim F(X)) = sqrt(n), while
  // Pi_2^L(delta_X) stays at 1 on X_n = {0, ..., n}.
  double prev = 0.0;
  for (int n = 1; n <= 5; ++n) {
    const LipschitzMap d = LipschitzMap::dirac(instances::line_space(n));
    const NormEstimate sl = strictly_lip_p_summing_norm(d, kTwo, fast(5));
    const NormEstimate l = lip_p_summing_norm(d, kTwo, fast(5));
    EXPECT_NEAR(sl.lower, std::sqrt(n), 1e-6);
    EXPECT_GE(sl.upper, std::sqrt(n) - 1e-9);
    EXPECT_GT(sl.lower, prev);
    prev = sl.lower;
    EXPECT_NEAR(l.upper, 1.0, 1e-6);
    expect_certified(sl, subject_json(d));
    expect_certified(l, subject_json(d));
  }
}

TEST(Lipschitz, OrderingOfTheTwoLipschitzClasses) {
  Rng rng = make_rng(45);
  for (int t = 0; t < 8; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 3, 5));
    const LipschitzMap T = instances::random_map(rng, X, FinNormedSpace(2, kTwo));
    const NormEstimate sl = strictly_lip_p_summing_norm(T, kTwo, fast(6));
    const NormEstimate l = lip_p_summing_norm(T, kTwo, fast(6));
    EXPECT_LE(l.lower, sl.upper * (1 + 1e-9));
    EXPECT_GE(l.upper, T.lip_constant() - 1e-9);
    // Strictly Lipschitz 2-summing is 2-summing of the linearization.
    EXPECT_TRUE(sl.overlaps(pi_norm(linearize(T), kTwo, fast(6)), 1e-9));
    expect_certified(sl, subject_json(T));
    expect_certified(l, subject_json(T));
  }
}

TEST(Lipschitz, BasisSubsetOfEuclideanThreeSpace) {
  // X = {0, e1, e2, e3} in l_2^3 with T the inclusion. Both brackets are
  // certified on each side; sqrt(1.5) is the frozen common value, strictly
  // below pi_2(id of l_2^3) = sqrt(3).
  Matrix pts = Matrix::Zero(3, 4);
  pts.rightCols(3) = Matrix::Identity(3, 3);
  const auto X = share(PointedMetricSpace::from_points(pts, kTwo));
  const LipschitzMap T(X, FinNormedSpace(3, kTwo), pts);
  const NormEstimate sl = strictly_lip_p_summing_norm(T, kTwo, fast(7));
  const NormEstimate l = lip_p_summing_norm(T, kTwo, fast(7));
  EXPECT_TRUE(sl.contains(std::sqrt(1.5), 1e-6)) << sl.lower << " " << sl.upper;
  EXPECT_TRUE(l.contains(std::sqrt(1.5), 1e-6)) << l.lower << " " << l.upper;
  expect_certified(sl, subject_json(T));
  expect_certified(l, subject_json(T));
}

TEST(StronglySumming, HilbertSchmidtOnEuclideanSpaces) {
  // D_2(u) = pi_2(u*) and the adjoint of a Hilbert-space map has the same
  // Hilbert-Schmidt norm.
  Rng rng = make_rng(46);
  for (int t = 0; t < 6; ++t) {
    const Matrix a = gaussian_matrix(rng, 2, 3);
    const auto u = LinearOperator::on_normed(FinNormedSpace(3, kTwo), FinNormedSpace(2, kTwo), a);
    const NormEstimate e = strongly_p_summing_norm(u, kTwo, fast(8));
    EXPECT_TRUE(e.contains(oracle::hilbert_schmidt(a), 1e-6)) << e.lower << " " << e.upper;
    expect_certified(e, subject_json(u));
  }
}

TEST(StronglySumming, LipschitzVersionCertifies) {
  Rng rng = make_rng(47);
  for (int t = 0; t < 4; ++t) {
    const auto X = instances::random_space(rng, 3);
    const LipschitzMap T = instances::random_map(rng, X, FinNormedSpace(2, kTwo));
    const NormEstimate e = lip_cohen_strongly_p_summing_norm(T, kTwo, fast(9));
    EXPECT_GE(e.upper, T.lip_constant() - 1e-9);
    EXPECT_LE(e.lower, e.upper);
    expect_certified(e, subject_json(T));
  }
}

TEST(PairingWitness, ReachesTheSummingLowerBound) {
  Rng rng = make_rng(48);
  for (int t = 0; t < 6; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 3, 4));
    const LipschitzMap T = instances::random_map(rng, X, FinNormedSpace(2, kTwo));
    const LinearOperator u = linearize(T);
    const NormEstimate pi = pi_norm(u, kTwo, fast(10));
    const PairingWitness w = sl_pairing_witness(T, kTwo, witness_sequence(pi, u.domain_dim()), {});
    EXPECT_GE(w.ratio, 0.9 * pi.lower);
    EXPECT_LE(w.ratio, pi.upper + 1e-6);
    EXPECT_NEAR(w.pairing, pair_with_map(T, w.tensor), 1e-9 * std::max(1.0, std::abs(w.pairing)));
  }
}

TEST(Summing, SeedDeterminism) {
  Rng rng = make_rng(49);
  const auto X = instances::random_space(rng, 4);
  const LipschitzMap T = instances::random_map(rng, X, FinNormedSpace(2, Exponent::finite(1.0)));
  const NormEstimate a = pi_norm(linearize(T), Exponent::finite(3.0), fast(11));
  SummingOptions threaded = fast(11);
  threaded.threads = 3;
  const NormEstimate b = pi_norm(linearize(T), Exponent::finite(3.0), threaded);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}
