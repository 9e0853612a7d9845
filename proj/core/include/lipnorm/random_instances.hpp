#pragma once

#include "lipnorm/lipmap.hpp"
#include "lipnorm/optim.hpp"
#include "lipnorm/tensor.hpp"

namespace lipnorm::instances {

/// n points in l_2^dim with the induced metric. Point 0 is the origin and
/// the base; the others are standard Gaussian.
PointedMetricSpace euclidean_points(Rng& rng, int n, int dim);

/// Coordinates used by euclidean_points, for callers that need beta_X.
Matrix gaussian_points(Rng& rng, int n, int dim);

/// Random symmetric matrix with entries in [0.5, 2) repaired into a metric
/// by shortest-path closure.
PointedMetricSpace repaired_metric(Rng& rng, int n);

/// Either generator, chosen by a fair coin.
SpaceRef random_space(Rng& rng, int n);

/// X_n = {0, 1, ..., n} on the real line, based at 0.
SpaceRef line_space(int n);

/// Gaussian values at the non-base points.
LipschitzMap random_map(Rng& rng, const SpaceRef& X, const Codomain& E);

/// Sum of `terms` terms delta_(x,y) [x] e over random distinct pairs with
/// Gaussian e.
TensorElement random_tensor(Rng& rng, const SpaceRef& X, const FinNormedSpace& E, int terms);

/// Uniform integer in [lo, hi].
int uniform_int(Rng& rng, int lo, int hi);

}  // namespace lipnorm::instances
