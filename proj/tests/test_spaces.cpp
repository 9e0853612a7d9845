#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "lipnorm/error.hpp"
#include "lipnorm/optim.hpp"
#include "lipnorm/random_instances.hpp"
#include "lipnorm/spaces.hpp"
#include "oracles.hpp"

using namespace lipnorm;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix three_point(double ab) {
  Matrix d(3, 3);
  d << 0, 1, 2, 1, 0, ab, 2, ab, 0;
  return d;
}

bool has_kind(const std::vector<MetricViolation>& v, MetricViolation::Kind k) {
  for (const auto& m : v) {
    if (m.kind == k) return true;
  }
  return false;
}

}  // namespace

TEST(Exponent, ConjugatePairs) {
  EXPECT_TRUE(Exponent::finite(2.0).conjugate() == Exponent::finite(2.0));
  EXPECT_TRUE(Exponent::finite(1.0).conjugate().is_infinite());
  EXPECT_TRUE(Exponent::infinity().conjugate() == Exponent::finite(1.0));
  EXPECT_NEAR(Exponent::finite(3.0).conjugate().value(), 1.5, 1e-15);
  EXPECT_TRUE(Exponent::parse("inf").is_infinite());
  EXPECT_THROW(Exponent::parse("two"), InputError);
  EXPECT_THROW(Exponent::finite(0.5), InputError);
}

TEST(Metric, AcceptsValidMatrix) {
  EXPECT_TRUE(validate_metric(three_point(1.5), 3).empty());
  const PointedMetricSpace X({"0", "a", "b"}, three_point(1.5));
  EXPECT_EQ(X.size(), 3u);
  EXPECT_EQ(X.free_dim(), 2);
  EXPECT_EQ(X.index_of("b"), 2u);
  EXPECT_DOUBLE_EQ(X.min_distance(), 1.0);
  EXPECT_DOUBLE_EQ(X.max_distance(), 2.0);
}

TEST(Metric, ReportsEachAxiom) {
  EXPECT_TRUE(has_kind(validate_metric(three_point(5.0), 3), MetricViolation::Kind::Triangle));
  Matrix asym = three_point(1.5);
  asym(0, 1) = 1.2;
  EXPECT_TRUE(has_kind(validate_metric(asym, 3), MetricViolation::Kind::Symmetry));
  Matrix diag = three_point(1.5);
  diag(1, 1) = 0.1;
  EXPECT_TRUE(has_kind(validate_metric(diag, 3), MetricViolation::Kind::Diagonal));
  Matrix zero = three_point(1.5);
  zero(1, 2) = zero(2, 1) = 0.0;
  EXPECT_TRUE(has_kind(validate_metric(zero, 3), MetricViolation::Kind::Positivity));
  EXPECT_THROW(PointedMetricSpace({"0", "a", "b"}, three_point(5.0)), InputError);
  EXPECT_THROW(validate_metric(three_point(1.5), 4), InputError);
}

TEST(Metric, TriangleSlackWithinToleranceIsAccepted) {
  // d(a,b) = d(a,0) + d(0,b) + 1e-13 breaks the triangle inequality by less
  // than the metric tolerance.
  EXPECT_TRUE(validate_metric(three_point(3.0 + 1e-13), 3).empty());
  EXPECT_FALSE(validate_metric(three_point(3.0 + 1e-9), 3).empty());
}

TEST(Metric, PointsInduceTheirNormDistance) {
  Rng rng = make_rng(11);
  const Matrix pts = instances::gaussian_points(rng, 6, 3);
  for (double q : {1.0, 2.0, kInf}) {
    const Exponent e = std::isinf(q) ? Exponent::infinity() : Exponent::finite(q);
    const auto X = PointedMetricSpace::from_points(pts, e);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
        EXPECT_NEAR(X.distance(i, j), oracle::lp(pts.col(a) - pts.col(b), q), 1e-12);
      }
    }
  }
}

TEST(Metric, RepairedRandomMetricsAreMetrics) {
  Rng rng = make_rng(5);
  for (int t = 0; t < 50; ++t) {
    const int n = instances::uniform_int(rng, 2, 12);
    const auto X = instances::repaired_metric(rng, n);
    EXPECT_TRUE(validate_metric(X.distances(), X.size()).empty());
  }
}

TEST(NormedSpace, HolderPairingAndNormingFunctional) {
  Rng rng = make_rng(3);
  for (double q : {1.0, 1.5, 2.0, 3.0, kInf}) {
    const Exponent e = std::isinf(q) ? Exponent::infinity() : Exponent::finite(q);
    const FinNormedSpace E(4, e);
    for (int t = 0; t < 20; ++t) {
      const Vector v = gaussian_vector(rng, 4);
      const Vector f = gaussian_vector(rng, 4);
      EXPECT_NEAR(E.norm(v), oracle::lp(v, q), 1e-12);
      EXPECT_LE(std::abs(f.dot(v)), E.norm(v) * E.dual_norm(f) * (1 + 1e-12));
      const Vector g = E.norming_functional(v);
      EXPECT_NEAR(E.dual_norm(g), 1.0, 1e-12);
      EXPECT_NEAR(g.dot(v), E.norm(v), 1e-10);
    }
  }
}

TEST(NormedSpace, DualBallVertices) {
  const FinNormedSpace l1(3, Exponent::finite(1.0));
  const auto v1 = l1.dual_ball_vertices();
  // One representative of each +/- pair.
  EXPECT_EQ(v1.size(), 4u);  // sign vectors, the l_inf ball
  const FinNormedSpace linf(3, Exponent::infinity());
  EXPECT_EQ(linf.dual_ball_vertices().size(), 3u);  // e_i
  for (const auto& v : v1) EXPECT_NEAR(l1.dual_norm(v), 1.0, 1e-15);
  EXPECT_THROW(FinNormedSpace(kMaxEnumerationDim + 1, Exponent::finite(1.0)).dual_ball_vertices(),
               CapacityError);
}

TEST(Sequences, WeakNormBracketsTheSpectralOracle) {
  // In l_2 the weak l_2 norm of a sequence is the largest singular value.
  Rng rng = make_rng(8);
  for (int t = 0; t < 20; ++t) {
    const Matrix m = gaussian_matrix(rng, 3, 5);
    const VectorSequence s{FinNormedSpace(3, Exponent::finite(2.0)), m};
    const NormEstimate w = weak_norm(s, Exponent::finite(2.0));
    EXPECT_TRUE(w.contains(oracle::spectral(m), 1e-8)) << w.lower << " " << w.upper;
  }
}

TEST(Sequences, StrongAndWeakOrdering) {
  Rng rng = make_rng(9);
  for (double q : {1.0, 2.0, kInf}) {
    const Exponent e = std::isinf(q) ? Exponent::infinity() : Exponent::finite(q);
    const Matrix m = gaussian_matrix(rng, 3, 4);
    const VectorSequence s{FinNormedSpace(3, e), m};
    double manual = 0.0;
    for (Eigen::Index j = 0; j < 4; ++j) manual += std::pow(oracle::lp(m.col(j), q), 2.0);
    EXPECT_NEAR(strong_norm(s, Exponent::finite(2.0)), std::sqrt(manual), 1e-12);
    // weak <= strong, and weak >= every single term.
    const NormEstimate w = weak_norm(s, Exponent::finite(2.0));
    EXPECT_LE(w.lower, strong_norm(s, Exponent::finite(2.0)) + 1e-12);
    for (Eigen::Index j = 0; j < 4; ++j) EXPECT_GE(w.upper, oracle::lp(m.col(j), q) - 1e-12);
  }
}
