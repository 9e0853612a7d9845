#pragma once

#include <optional>
#include <vector>

#include "lipnorm/free_space.hpp"

namespace lipnorm {

/// Target space of maps and operators: an l_p space, or a free space F(Y)
/// carrying the Arens-Eells norm (coordinates over Y's non-base points).
class Codomain {
 public:
  Codomain(FinNormedSpace space);  // NOLINT: implicit by design of call sites
  static Codomain free_space(const SpaceRef& space);

  int dim() const;
  bool is_free() const { return free_ != nullptr; }
  bool is_euclidean() const { return !free_ && normed_->is_euclidean(); }
  /// Throws InputError for a free-space codomain.
  const FinNormedSpace& normed() const;
  const SpaceRef& free() const { return free_; }
  const LipBall& ball() const;

  double norm(const Vector& v) const;
  bool operator==(const Codomain& other) const;

 private:
  std::optional<FinNormedSpace> normed_;
  SpaceRef free_;
  std::shared_ptr<const LipBall> ball_;
};

/// Linear operator between finite-dimensional spaces, stored as a matrix of
/// size codomain.dim() x domain_dim(). The domain is either F(X), with
/// columns indexed by non-base points, or an l_p space.
class LinearOperator {
 public:
  static LinearOperator on_free_space(SpaceRef domain, Codomain codomain, Matrix matrix);
  static LinearOperator on_normed(FinNormedSpace domain, Codomain codomain, Matrix matrix);
  /// Identity on F(X).
  static LinearOperator free_identity(const SpaceRef& space);

  bool domain_is_free() const { return free_domain_ != nullptr; }
  const SpaceRef& free_domain() const { return free_domain_; }
  /// Throws InputError when the domain is F(X).
  const FinNormedSpace& normed_domain() const;
  int domain_dim() const { return static_cast<int>(matrix_.cols()); }
  const Codomain& codomain() const { return codomain_; }
  const Matrix& matrix() const { return matrix_; }

  Vector apply(const Vector& x) const;
  Vector apply(const FreeVector& m) const;

  /// u o this, for a matrix u acting on the codomain.
  LinearOperator followed_by(const Matrix& u, Codomain new_codomain) const;

 private:
  LinearOperator(SpaceRef free_domain, std::optional<FinNormedSpace> normed_domain,
                 Codomain codomain, Matrix matrix);

  SpaceRef free_domain_;
  std::optional<FinNormedSpace> normed_domain_;
  Codomain codomain_;
  Matrix matrix_;
};

/// Tabulated Lipschitz map X -> E with T(base) = 0.
class LipschitzMap {
 public:
  /// `values` is codomain.dim() x |X|, one column per point. A nonzero base
  /// column is rejected rather than translated.
  LipschitzMap(SpaceRef domain, Codomain codomain, Matrix values);

  /// x -> f(x) e.
  static LipschitzMap rank_one(const LipschitzFunctional& f, const Vector& e,
                               FinNormedSpace codomain);
  static LipschitzMap zero(SpaceRef domain, Codomain codomain);
  /// delta_X : X -> F(X).
  static LipschitzMap dirac(const SpaceRef& domain);

  const SpaceRef& domain() const { return domain_; }
  const Codomain& codomain() const { return codomain_; }
  const Matrix& values() const { return values_; }
  Vector value(std::size_t x) const { return values_.col(static_cast<Eigen::Index>(x)); }

  /// max over x != y of ||T(x) - T(y)|| / d(x, y).
  double lip_constant() const;
  /// The same maximum as an exact estimate; the lower certificate names
  /// the maximizing pair.
  NormEstimate lip_estimate() const;

 private:
  SpaceRef domain_;
  Codomain codomain_;
  Matrix values_;
};

/// Map between pointed metric spaces given by point indices, base to base.
class PointMap {
 public:
  PointMap(SpaceRef from, SpaceRef to, std::vector<std::size_t> image);

  const SpaceRef& from() const { return from_; }
  const SpaceRef& to() const { return to_; }
  std::size_t operator()(std::size_t z) const { return image_.at(z); }
  double lip_constant() const;

 private:
  SpaceRef from_;
  SpaceRef to_;
  std::vector<std::size_t> image_;
};

/// The unique linear map on F(X) with T^ o delta_X = T: column x is T(x).
LinearOperator linearize(const LipschitzMap& T);

/// T^t(e*) : x -> <e*, T(x)>.
LipschitzFunctional transpose_apply(const LipschitzMap& T, const Vector& dual_vector);

/// beta_X : F(X) -> ambient for a finite X inside an l_p space. `points`
/// holds the coordinates of X's points (ambient.dim() x |X|) with the base
/// at the origin; X's metric must be the one induced by the ambient norm.
LinearOperator beta_map(const SpaceRef& X, const Matrix& points, FinNormedSpace ambient);

/// u o T.
LipschitzMap compose(const Matrix& u, Codomain codomain, const LipschitzMap& T);
/// T o g.
LipschitzMap compose(const LipschitzMap& T, const PointMap& g);

}  // namespace lipnorm
