#pragma once

#include <memory>
#include <vector>

#include "lipnorm/estimate.hpp"
#include "lipnorm/spaces.hpp"

namespace lipnorm {

using SpaceRef = std::shared_ptr<const PointedMetricSpace>;

inline SpaceRef share(PointedMetricSpace space) {
  return std::make_shared<const PointedMetricSpace>(std::move(space));
}

/// Coefficients below this magnitude are set to zero before norm computation.
inline constexpr double kCoeffZeroTol = 1e-14;

/// Lipschitz-1 ball vertex enumeration refuses above this many points.
inline constexpr std::size_t kMaxVertexPoints = 10;

/// Element of F(X): coefficients of delta_x for each non-base point x.
class FreeVector {
 public:
  FreeVector(SpaceRef space, Vector coeffs);

  static FreeVector zero(SpaceRef space);
  /// delta_X(x), i.e. the molecule (x, base). Zero when x is the base.
  static FreeVector point(SpaceRef space, std::size_t x);

  const SpaceRef& space() const { return space_; }
  const Vector& coeffs() const { return coeffs_; }
  /// Coefficient at point `x`; the base carries the implicit balancing weight.
  double coeff_at(std::size_t x) const;
  /// Coefficients over all points, base included, summing to zero.
  Vector balanced() const;

  FreeVector canonical() const;
  bool is_zero() const;

  FreeVector operator+(const FreeVector& other) const;
  FreeVector operator-(const FreeVector& other) const;
  FreeVector operator*(double s) const;

 private:
  SpaceRef space_;
  Vector coeffs_;
};

inline FreeVector operator*(double s, const FreeVector& m) { return m * s; }

/// delta_(x,y) = delta_x - delta_y. Throws InputError when x == y.
FreeVector molecule(const SpaceRef& space, std::size_t x, std::size_t y);

/// Real function on X vanishing at the base point.
class LipschitzFunctional {
 public:
  /// `values` has one entry per point; the base entry must be zero.
  LipschitzFunctional(SpaceRef space, Vector values);
  /// Build from free-space coordinates (non-base values).
  static LipschitzFunctional from_coords(SpaceRef space, const Vector& coords);
  static LipschitzFunctional zero(SpaceRef space);

  const SpaceRef& space() const { return space_; }
  const Vector& values() const { return values_; }
  double operator()(std::size_t x) const { return values_(static_cast<Eigen::Index>(x)); }
  /// Values at non-base points, in free-space coordinate order.
  Vector coords() const;

  /// max over x != y of |f(x) - f(y)| / d(x, y); exact finite maximum.
  double lip_constant() const;

 private:
  SpaceRef space_;
  Vector values_;
};

/// m(f) = sum_x coeffs[x] f(x). Throws InputError on a space mismatch.
double pair(const LipschitzFunctional& f, const FreeVector& m);

/// Arens-Eells norm by the transportation LP, with the optimal flow as the
/// upper certificate and the optimal dual potential as the lower one.
struct AeNormResult {
  NormEstimate estimate;
  Matrix flow;  // flow(i, j) >= 0 over all points
  LipschitzFunctional potential;
};

AeNormResult ae_norm(const FreeVector& m);

/// Kantorovich-Rubinstein side: max sum coeffs[x] f(x) over Lip(f) <= 1,
/// f(base) = 0, solved as its own LP.
struct KrDualResult {
  double value = 0.0;
  LipschitzFunctional maximizer;
};

KrDualResult ae_dual_norm(const FreeVector& m);

/// All vertices of {f : Lip(f) <= 1, f(base) = 0}. Each is checked to be
/// feasible with free_dim linearly independent tight constraints.
/// Throws CapacityError above kMaxVertexPoints points.
std::vector<LipschitzFunctional> lip_ball_vertices(const SpaceRef& space);

/// The Lipschitz-1 polytope as a matrix of vertices (free_dim x K), one
/// representative per +/- pair. The dual unit ball of F(X).
class LipBall {
 public:
  explicit LipBall(const SpaceRef& space);

  const SpaceRef& space() const { return space_; }
  const Matrix& vertices() const { return vertices_; }
  std::size_t count() const { return static_cast<std::size_t>(vertices_.cols()); }

  /// max_f |<f, m>| over the ball: the Arens-Eells norm of coordinates `m`.
  double support(const Vector& m) const;
  /// Index of a maximizing vertex for `support`.
  Eigen::Index argmax(const Vector& m) const;
  /// Weak l_p norm in F(X) of the columns of `coords` (free_dim x N). Exact.
  NormEstimate weak_norm(const Matrix& coords, Exponent p) const;
  double weak_norm_value(const Matrix& coords, Exponent p) const;

 private:
  SpaceRef space_;
  Matrix vertices_;
};

}  // namespace lipnorm
