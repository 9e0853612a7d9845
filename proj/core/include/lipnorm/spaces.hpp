#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lipnorm/estimate.hpp"
#include "lipnorm/exponent.hpp"

namespace lipnorm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Violations smaller than this are treated as floating-point slack.
inline constexpr double kMetricTol = 1e-12;

/// Dual-ball vertex enumeration refuses beyond this dimension.
inline constexpr int kMaxEnumerationDim = 16;

struct MetricViolation {
  enum class Kind { Diagonal, Symmetry, Positivity, Triangle };
  Kind kind;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;  // intermediate point, Triangle only
  double slack = 0.0;

  std::string describe() const;
};

/// Checks every metric axiom. Throws InputError when the matrix is not
/// square of size `point_count`.
std::vector<MetricViolation> validate_metric(const Matrix& dist,
                                             std::size_t point_count);

/// Finite metric space with a distinguished base point.
///
/// Construction validates the metric; an invalid matrix throws InputError
/// naming the first violations. Immutable afterwards.
class PointedMetricSpace {
 public:
  PointedMetricSpace(std::vector<std::string> names, Matrix dist,
                     std::size_t base = 0);

  /// Points 0..n-1 named "0","1",... with base 0.
  static PointedMetricSpace from_matrix(Matrix dist);
  /// Induced metric of columns of `coords` under the l_q norm; column 0 is
  /// taken as the base point and must be the origin.
  static PointedMetricSpace from_points(const Matrix& coords, Exponent q);

  std::size_t size() const { return names_.size(); }
  std::size_t base() const { return base_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;

  double distance(std::size_t i, std::size_t j) const { return dist_(i, j); }
  const Matrix& distances() const { return dist_; }
  double min_distance() const;
  double max_distance() const;

  /// Dimension of the free space: number of non-base points.
  int free_dim() const { return static_cast<int>(size()) - 1; }
  /// Coordinate of point `i` among the non-base points, or -1 for the base.
  int coord(std::size_t i) const;
  /// Point index for free-space coordinate `c`.
  std::size_t point_of_coord(int c) const;

  bool operator==(const PointedMetricSpace& other) const;

 private:
  std::vector<std::string> names_;
  Matrix dist_;
  std::size_t base_;
};

/// The space R^dim with the l_p norm.
class FinNormedSpace {
 public:
  FinNormedSpace(int dim, Exponent p);

  int dim() const { return dim_; }
  Exponent exponent() const { return p_; }
  /// The dual space: same dimension, conjugate exponent.
  FinNormedSpace dual() const { return FinNormedSpace(dim_, p_.conjugate()); }
  bool is_euclidean() const { return p_.is(2.0); }
  /// True when the dual unit ball is a polytope (l_1 or l_inf).
  bool dual_ball_is_polytope() const;

  double norm(const Vector& v) const;
  double dual_norm(const Vector& v) const;
  /// A unit dual vector v* with <v*, v> = norm(v). Zero for v = 0.
  Vector norming_functional(const Vector& v) const;
  /// Vertices of the dual unit ball, one of each +/- pair.
  /// Throws CapacityError above kMaxEnumerationDim for l_1.
  std::vector<Vector> dual_ball_vertices() const;

  bool operator==(const FinNormedSpace& other) const {
    return dim_ == other.dim_ && p_ == other.p_;
  }

 private:
  int dim_;
  Exponent p_;
};

/// l_p norm of a plain coordinate vector.
double lp_norm(const Vector& v, Exponent p);

/// Finite sequence of vectors in a FinNormedSpace, stored as matrix columns.
struct VectorSequence {
  FinNormedSpace space;
  Matrix vectors;  // dim x count

  std::size_t count() const { return static_cast<std::size_t>(vectors.cols()); }
  VectorSequence appended(const Vector& v) const;
};

/// (sum ||x_i||^p)^(1/p), max for p = inf. Zero for the empty sequence.
double strong_norm(const VectorSequence& seq, Exponent p);

struct WeakNormOptions {
  unsigned long long seed = 0xC0FFEE;
  int restarts = 16;
  int max_iterations = 200;
};

/// Weak l_p norm: sup over the dual unit ball of (sum |<x*, x_i>|^p)^(1/p).
///
/// Exact for p = inf, for l_1 / l_inf spaces (dual-ball vertices) and for
/// p = 2 on l_2 (spectral norm). Otherwise the lower side comes from a
/// seeded nonlinear power iteration and the upper side from Hoelder bounds,
/// flagged loose.
NormEstimate weak_norm(const VectorSequence& seq, Exponent p,
                       const WeakNormOptions& options = {});

/// (sum_i |<x*, x_i>|^p)^(1/p) for a fixed functional.
double weak_norm_at(const Matrix& vectors, const Vector& functional, Exponent p);

}  // namespace lipnorm
