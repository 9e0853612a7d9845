#include <gtest/gtest.h>

#include <cmath>

#include "lipnorm/error.hpp"
#include "lipnorm/free_space.hpp"
#include "lipnorm/optim.hpp"
#include "lipnorm/random_instances.hpp"
#include "oracles.hpp"

using namespace lipnorm;

namespace {

SpaceRef on_line(const std::vector<double>& t) {
  Matrix pts(1, static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) pts(0, static_cast<Eigen::Index>(i)) = t[i];
  return share(PointedMetricSpace::from_points(pts, Exponent::finite(1.0)));
}

FreeVector random_vector(Rng& rng, const SpaceRef& X) {
  Vector c = gaussian_vector(rng, X->free_dim());
  return FreeVector(X, c);
}

}  // namespace

TEST(FreeSpace, MoleculeNormIsDistance) {
  Rng rng = make_rng(1);
  for (int t = 0; t < 30; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 2, 8));
    const auto n = static_cast<int>(X->size());
    const auto x = static_cast<std::size_t>(instances::uniform_int(rng, 0, n - 1));
    auto y = static_cast<std::size_t>(instances::uniform_int(rng, 0, n - 2));
    if (y >= x) ++y;
    const NormEstimate e = ae_norm(molecule(X, x, y)).estimate;
    EXPECT_TRUE(e.exact);
    EXPECT_NEAR(e.lower, X->distance(x, y), 1e-12);
    EXPECT_NEAR(e.upper, X->distance(x, y), 1e-12);
  }
}

TEST(FreeSpace, LineTransportOracle) {
  // On a subset of the real line the Arens-Eells norm is the integral of
  // the absolute cumulative mass, with the base point absorbing the total.
  Rng rng = make_rng(2);
  for (int t = 0; t < 40; ++t) {
    const int n = instances::uniform_int(rng, 2, 10);
    std::vector<double> pos(static_cast<std::size_t>(n), 0.0);
    for (int i = 1; i < n; ++i) pos[static_cast<std::size_t>(i)] = 3.0 * gaussian_vector(rng, 1)(0);
    const auto X = on_line(pos);
    const FreeVector m = random_vector(rng, X);
    std::vector<double> mass(static_cast<std::size_t>(n));
    const Vector b = m.balanced();
    for (int i = 0; i < n; ++i) mass[static_cast<std::size_t>(i)] = b(i);
    const double want = oracle::line_transport(pos, mass);
    const NormEstimate e = ae_norm(m).estimate;
    EXPECT_NEAR(e.upper, want, 1e-9 * std::max(1.0, want));
    EXPECT_NEAR(e.lower, want, 1e-9 * std::max(1.0, want));
  }
}

TEST(FreeSpace, BalancedPutsTheRemainderOnTheBase) {
  const auto X = on_line({0.0, 1.0, 2.0});
  const FreeVector m = FreeVector::point(X, 2);
  const Vector b = m.balanced();
  EXPECT_DOUBLE_EQ(b.sum(), 0.0);
  EXPECT_DOUBLE_EQ(b(0), -1.0);
  EXPECT_NEAR(ae_norm(m).estimate.upper, 2.0, 1e-12);
}

TEST(FreeSpace, PrimalEqualsKantorovichDual) {
  Rng rng = make_rng(3);
  for (int t = 0; t < 40; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 2, 12));
    const FreeVector m = random_vector(rng, X);
    const AeNormResult p = ae_norm(m);
    const KrDualResult d = ae_dual_norm(m);
    EXPECT_NEAR(p.estimate.upper, d.value, 1e-9 * std::max(1.0, d.value));
    EXPECT_LE(d.maximizer.lip_constant(), 1.0 + 1e-9);
    EXPECT_NEAR(pair(d.maximizer, m), d.value, 1e-9 * std::max(1.0, d.value));
  }
}

TEST(FreeSpace, NormAxioms) {
  Rng rng = make_rng(4);
  for (int t = 0; t < 30; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 2, 7));
    const FreeVector a = random_vector(rng, X), b = random_vector(rng, X);
    const double na = ae_norm(a).estimate.upper, nb = ae_norm(b).estimate.upper;
    EXPECT_LE(ae_norm(a + b).estimate.lower, na + nb + 1e-9);
    EXPECT_NEAR(ae_norm(a * -2.5).estimate.upper, 2.5 * na, 1e-9 * std::max(1.0, na));
  }
  const auto X = instances::line_space(3);
  EXPECT_EQ(ae_norm(FreeVector::zero(X)).estimate.upper, 0.0);
  EXPECT_EQ(ae_norm(FreeVector::point(X, X->base())).estimate.upper, 0.0);
}

TEST(FreeSpace, FlowAndPotentialCertify) {
  Rng rng = make_rng(5);
  const auto X = instances::random_space(rng, 6);
  const FreeVector m = random_vector(rng, X);
  const AeNormResult r = ae_norm(m);
  // The flow moves the balanced mass; its cost is the upper bound.
  const Vector b = m.balanced();
  const Vector net = r.flow.rowwise().sum() - r.flow.colwise().sum().transpose();
  EXPECT_LE((net - b).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_GE(r.flow.minCoeff(), 0.0);
  EXPECT_NEAR(r.flow.cwiseProduct(X->distances()).sum(), r.estimate.upper, 1e-9);
  EXPECT_LE(r.potential.lip_constant(), 1.0 + 1e-9);
  EXPECT_NEAR(pair(r.potential, m), r.estimate.lower, 1e-9);
}

TEST(LipBall, VerticesAreExtremeLipschitzFunctions) {
  Rng rng = make_rng(6);
  for (int t = 0; t < 10; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 2, 6));
    const LipBall ball(X);
    for (Eigen::Index k = 0; k < ball.vertices().cols(); ++k) {
      const auto f = LipschitzFunctional::from_coords(X, ball.vertices().col(k));
      EXPECT_NEAR(f.lip_constant(), 1.0, 1e-9);
    }
    // The support function of the Lipschitz ball is the Arens-Eells norm.
    for (int s = 0; s < 10; ++s) {
      const FreeVector m = random_vector(rng, X);
      const double want = ae_norm(m).estimate.upper;
      EXPECT_NEAR(ball.support(m.coeffs()), want,
                  1e-9 * std::max(1.0, want));
    }
  }
}

TEST(LipBall, TwoPointSpaceHasOneVertexPair) {
  Matrix d(2, 2);
  d << 0, 2, 2, 0;
  const auto X = share(PointedMetricSpace::from_matrix(d));
  const LipBall ball(X);
  ASSERT_EQ(ball.count(), 1u);  // f(y) = +-2, stored once
  EXPECT_NEAR(ball.vertices().cwiseAbs().maxCoeff(), 2.0, 1e-15);
}

TEST(LipBall, CapacityCap) {
  EXPECT_THROW(LipBall(instances::line_space(static_cast<int>(kMaxVertexPoints))), CapacityError);
  EXPECT_NO_THROW(LipBall(instances::line_space(static_cast<int>(kMaxVertexPoints) - 1)));
}

TEST(Lipschitz, ConstantMatchesPairScan) {
  Rng rng = make_rng(7);
  for (int t = 0; t < 20; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 2, 9));
    Vector v = gaussian_vector(rng, static_cast<Eigen::Index>(X->size()));
    v(static_cast<Eigen::Index>(X->base())) = 0.0;
    const LipschitzFunctional f(X, v);
    const double want =
        oracle::lip_pairs(*X, Matrix(v.transpose()), [](const Vector& x) { return std::abs(x(0)); });
    EXPECT_NEAR(f.lip_constant(), want, 1e-12);
  }
}
