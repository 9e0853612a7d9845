#include "lipnorm/random_instances.hpp"

#include <algorithm>
#include <random>

#include "lipnorm/error.hpp"

namespace lipnorm::instances {

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Matrix gaussian_points(Rng& rng, int n, int dim) {
  if (n < 1 || dim < 1) throw InputError("need at least one point and one dimension");
  Matrix pts = gaussian_matrix(rng, dim, n);
  pts.col(0).setZero();
  return pts;
}

PointedMetricSpace euclidean_points(Rng& rng, int n, int dim) {
  return PointedMetricSpace::from_points(gaussian_points(rng, n, dim), Exponent::finite(2.0));
}

PointedMetricSpace repaired_metric(Rng& rng, int n) {
  if (n < 1) throw InputError("need at least one point");
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Matrix d = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = u(rng);
  }
  // Floyd-Warshall closure makes the triangle inequality hold.
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    }
  }
  return PointedMetricSpace::from_matrix(std::move(d));
}

SpaceRef random_space(Rng& rng, int n) {
  if (std::bernoulli_distribution(0.5)(rng)) return share(euclidean_points(rng, n, 2));
  return share(repaired_metric(rng, n));
}

SpaceRef line_space(int n) {
  Matrix pts(1, n + 1);
  for (int i = 0; i <= n; ++i) pts(0, i) = i;
  return share(PointedMetricSpace::from_points(pts, Exponent::finite(2.0)));
}

LipschitzMap random_map(Rng& rng, const SpaceRef& X, const Codomain& E) {
  Matrix v = gaussian_matrix(rng, E.dim(), static_cast<Eigen::Index>(X->size()));
  v.col(static_cast<Eigen::Index>(X->base())).setZero();
  return LipschitzMap(X, E, v);
}

TensorElement random_tensor(Rng& rng, const SpaceRef& X, const FinNormedSpace& E, int terms) {
  if (X->size() < 2) throw InputError("tensors need at least two points");
  const int n = static_cast<int>(X->size());
  std::vector<TensorTerm> t;
  for (int k = 0; k < terms; ++k) {
    const int x = uniform_int(rng, 0, n - 1);
    int y = uniform_int(rng, 0, n - 2);
    if (y >= x) ++y;
    t.push_back({static_cast<std::size_t>(x), static_cast<std::size_t>(y), gaussian_vector(rng, E.dim())});
  }
  return TensorElement(X, E, std::move(t));
}

}  // namespace lipnorm::instances
