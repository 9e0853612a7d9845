#include <gtest/gtest.h>

#include <cmath>

#include "lipnorm/error.hpp"
#include "lipnorm/lipmap.hpp"
#include "lipnorm/optim.hpp"
#include "lipnorm/random_instances.hpp"
#include "lipnorm/summing.hpp"
#include "oracles.hpp"

using namespace lipnorm;

namespace {

Exponent pick(int i) {
  return i == 0 ? Exponent::finite(1.0) : i == 1 ? Exponent::finite(2.0) : Exponent::infinity();
}

double as_double(Exponent e) { return e.is_infinite() ? INFINITY : e.value(); }

}  // namespace

TEST(Lipmap, LipConstantMatchesPairScan) {
  Rng rng = make_rng(21);
  for (int t = 0; t < 40; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 2, 9));
    const Exponent q = pick(t % 3);
    const FinNormedSpace E(instances::uniform_int(rng, 1, 4), q);
    const LipschitzMap T = instances::random_map(rng, X, E);
    const double want = oracle::lip_pairs(*X, T.values(), [&](const Vector& v) { return oracle::lp(v, as_double(q)); });
    EXPECT_NEAR(T.lip_constant(), want, 1e-12 * std::max(1.0, want));
    const NormEstimate e = T.lip_estimate();
    EXPECT_TRUE(e.exact);
    EXPECT_NEAR(e.upper, want, 1e-12 * std::max(1.0, want));
  }
}

TEST(Lipmap, LinearizationExtendsTheMap) {
  Rng rng = make_rng(22);
  const auto X = instances::random_space(rng, 6);
  const FinNormedSpace E(3, Exponent::finite(2.0));
  const LipschitzMap T = instances::random_map(rng, X, E);
  const LinearOperator u = linearize(T);
  for (std::size_t x = 0; x < X->size(); ++x) {
    for (std::size_t y = 0; y < X->size(); ++y) {
      if (x == y) continue;
      const Vector want = T.value(x) - T.value(y);
      EXPECT_LE((u.apply(molecule(X, x, y)) - want).norm(), 1e-12);
    }
  }
}

TEST(Lipmap, LinearizationIsIsometric) {
  Rng rng = make_rng(23);
  for (int t = 0; t < 60; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 2, 10));
    const FinNormedSpace E(instances::uniform_int(rng, 1, 4), pick(t % 3));
    const LipschitzMap T = instances::random_map(rng, X, E);
    const NormEstimate op = op_norm(linearize(T));
    EXPECT_TRUE(op.exact);
    EXPECT_NEAR(op.upper, T.lip_constant(), 1e-9 * std::max(1.0, T.lip_constant()));
  }
}

TEST(Lipmap, RankOneFactorizes) {
  Rng rng = make_rng(24);
  const auto X = instances::random_space(rng, 5);
  for (int t = 0; t < 10; ++t) {
    const auto f = LipschitzFunctional::from_coords(X, gaussian_vector(rng, X->free_dim()));
    const Vector e = gaussian_vector(rng, 3);
    const FinNormedSpace E(3, pick(t % 3));
    const LipschitzMap T = LipschitzMap::rank_one(f, e, E);
    EXPECT_NEAR(T.lip_constant(), f.lip_constant() * E.norm(e), 1e-12);
  }
}

TEST(Lipmap, DiracIsIsometricIntoFreeSpace) {
  Rng rng = make_rng(25);
  for (int t = 0; t < 10; ++t) {
    const auto X = instances::random_space(rng, instances::uniform_int(rng, 2, 7));
    const LipschitzMap d = LipschitzMap::dirac(X);
    EXPECT_TRUE(d.codomain().is_free());
    EXPECT_NEAR(d.lip_constant(), 1.0, 1e-12);
    EXPECT_NEAR(op_norm(linearize(d)).upper, 1.0, 1e-9);
  }
}

TEST(Lipmap, CompositionBounds) {
  Rng rng = make_rng(26);
  for (int t = 0; t < 20; ++t) {
    const auto X = instances::random_space(rng, 5);
    const auto Z = instances::random_space(rng, 4);
    std::vector<std::size_t> image(Z->size());
    for (std::size_t z = 0; z < Z->size(); ++z) {
      image[z] = z == Z->base() ? X->base() : static_cast<std::size_t>(instances::uniform_int(rng, 0, 4));
    }
    const PointMap g(Z, X, image);
    const FinNormedSpace E(2, Exponent::finite(2.0));
    const LipschitzMap T = instances::random_map(rng, X, E);
    EXPECT_LE(compose(T, g).lip_constant(), T.lip_constant() * g.lip_constant() * (1 + 1e-12) + 1e-12);
    const Matrix u = gaussian_matrix(rng, 3, 2);
    const FinNormedSpace G(3, Exponent::finite(2.0));
    EXPECT_LE(compose(u, G, T).lip_constant(), oracle::spectral(u) * T.lip_constant() * (1 + 1e-12));
  }
}

TEST(Lipmap, BetaMapSendsMoleculesToDifferences) {
  Rng rng = make_rng(27);
  const Matrix pts = instances::gaussian_points(rng, 5, 3);
  const auto X = share(PointedMetricSpace::from_points(pts, Exponent::finite(2.0)));
  const LinearOperator b = beta_map(X, pts, FinNormedSpace(3, Exponent::finite(2.0)));
  for (std::size_t x = 0; x < 5; ++x) {
    for (std::size_t y = 0; y < 5; ++y) {
      if (x == y) continue;
      const auto i = static_cast<Eigen::Index>(x), j = static_cast<Eigen::Index>(y);
      EXPECT_LE((b.apply(molecule(X, x, y)) - (pts.col(i) - pts.col(j))).norm(), 1e-12);
    }
  }
  EXPECT_NEAR(op_norm(b).upper, 1.0, 1e-9);
}

TEST(Lipmap, RejectsNonzeroBaseValue) {
  const auto X = instances::line_space(2);
  Matrix v = Matrix::Ones(2, 3);
  EXPECT_THROW(LipschitzMap(X, FinNormedSpace(2, Exponent::finite(2.0)), v), InputError);
}

TEST(Lipmap, TransposeApplyIsTheAdjointFunctional) {
  Rng rng = make_rng(28);
  const auto X = instances::random_space(rng, 5);
  const LipschitzMap T = instances::random_map(rng, X, FinNormedSpace(3, Exponent::finite(2.0)));
  const Vector e = gaussian_vector(rng, 3);
  const LipschitzFunctional f = transpose_apply(T, e);
  for (std::size_t x = 0; x < X->size(); ++x) EXPECT_NEAR(f(x), e.dot(T.value(x)), 1e-12);
}
