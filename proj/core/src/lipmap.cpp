#include "lipnorm/lipmap.hpp"

#include <algorithm>
#include <cmath>

#include "lipnorm/error.hpp"

namespace lipnorm {

Codomain::Codomain(FinNormedSpace space) : normed_(space) {}

Codomain Codomain::free_space(const SpaceRef& space) {
  Codomain c(FinNormedSpace(1, Exponent::finite(1.0)));
  c.normed_.reset();
  c.free_ = space;
  if (space->size() <= kMaxVertexPoints) c.ball_ = std::make_shared<const LipBall>(space);
  return c;
}

int Codomain::dim() const { return free_ ? free_->free_dim() : normed_->dim(); }

const FinNormedSpace& Codomain::normed() const {
  if (!normed_) throw InputError("codomain is a free space, not an l_p space");
  return *normed_;
}

const LipBall& Codomain::ball() const {
  if (!ball_) throw CapacityError("free-space codomain too large for vertex enumeration");
  return *ball_;
}

double Codomain::norm(const Vector& v) const {
  if (!free_) return normed_->norm(v);
  if (v.size() != free_->free_dim()) throw InputError("vector dimension mismatch");
  if (ball_) return ball_->support(v);
  return ae_norm(FreeVector(free_, v)).estimate.upper;
}

bool Codomain::operator==(const Codomain& other) const {
  if (is_free() != other.is_free()) return false;
  if (is_free()) return free_ == other.free_ || *free_ == *other.free_;
  return *normed_ == *other.normed_;
}

LinearOperator::LinearOperator(SpaceRef free_domain, std::optional<FinNormedSpace> normed_domain,
                               Codomain codomain, Matrix matrix)
    : free_domain_(std::move(free_domain)),
      normed_domain_(std::move(normed_domain)),
      codomain_(std::move(codomain)),
      matrix_(std::move(matrix)) {
  if (matrix_.rows() != codomain_.dim()) {
    throw InputError("operator matrix has " + std::to_string(matrix_.rows()) +
                     " rows, codomain dimension is " + std::to_string(codomain_.dim()));
  }
  const int expected = free_domain_ ? free_domain_->free_dim() : normed_domain_->dim();
  if (matrix_.cols() != expected) {
    throw InputError("operator matrix has " + std::to_string(matrix_.cols()) +
                     " columns, domain dimension is " + std::to_string(expected));
  }
}

LinearOperator LinearOperator::on_free_space(SpaceRef domain, Codomain codomain,
                                             Matrix matrix) {
  return LinearOperator(std::move(domain), std::nullopt, std::move(codomain), std::move(matrix));
}

LinearOperator LinearOperator::on_normed(FinNormedSpace domain, Codomain codomain,
                                         Matrix matrix) {
  return LinearOperator(nullptr, domain, std::move(codomain), std::move(matrix));
}

LinearOperator LinearOperator::free_identity(const SpaceRef& space) {
  const int k = space->free_dim();
  return on_free_space(space, Codomain::free_space(space), Matrix::Identity(k, k));
}

const FinNormedSpace& LinearOperator::normed_domain() const {
  if (!normed_domain_) throw InputError("operator domain is a free space");
  return *normed_domain_;
}

Vector LinearOperator::apply(const Vector& x) const {
  if (x.size() != matrix_.cols()) throw InputError("operator argument dimension mismatch");
  return matrix_ * x;
}

Vector LinearOperator::apply(const FreeVector& m) const {
  if (!free_domain_) throw InputError("operator domain is not a free space");
  if (!(m.space() == free_domain_ || *m.space() == *free_domain_)) {
    throw InputError("free vector lives on a different metric space");
  }
  return matrix_ * m.coeffs();
}

LinearOperator LinearOperator::followed_by(const Matrix& u, Codomain new_codomain) const {
  if (u.cols() != matrix_.rows()) throw InputError("composition dimension mismatch");
  return LinearOperator(free_domain_, normed_domain_, std::move(new_codomain), u * matrix_);
}

LipschitzMap::LipschitzMap(SpaceRef domain, Codomain codomain, Matrix values)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), values_(std::move(values)) {
  if (values_.rows() != codomain_.dim() ||
      values_.cols() != static_cast<Eigen::Index>(domain_->size())) {
    throw InputError("map values must be codomain.dim x |X|");
  }
  if (!values_.col(static_cast<Eigen::Index>(domain_->base())).isZero(0.0)) {
    throw InputError("Lipschitz map must send the base point to 0");
  }
}

LipschitzMap LipschitzMap::rank_one(const LipschitzFunctional& f, const Vector& e,
                                    FinNormedSpace codomain) {
  if (e.size() != codomain.dim()) throw InputError("vector dimension mismatch");
  return LipschitzMap(f.space(), std::move(codomain), e * f.values().transpose());
}

LipschitzMap LipschitzMap::zero(SpaceRef domain, Codomain codomain) {
  const auto n = static_cast<Eigen::Index>(domain->size());
  const int k = codomain.dim();
  return LipschitzMap(std::move(domain), std::move(codomain), Matrix::Zero(k, n));
}

LipschitzMap LipschitzMap::dirac(const SpaceRef& domain) {
  const int k = domain->free_dim();
  Matrix values = Matrix::Zero(k, static_cast<Eigen::Index>(domain->size()));
  for (int c = 0; c < k; ++c) values(c, static_cast<Eigen::Index>(domain->point_of_coord(c))) = 1.0;
  return LipschitzMap(domain, Codomain::free_space(domain), std::move(values));
}

double LipschitzMap::lip_constant() const {
  double lip = 0.0;
  const auto n = domain_->size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = codomain_.norm(values_.col(i) - values_.col(j)) / domain_->distance(i, j);
      lip = std::max(lip, r);
    }
  }
  return lip;
}

NormEstimate LipschitzMap::lip_estimate() const {
  NormEstimate e;
  e.quantity = "lip";
  std::size_t bi = 0, bj = 1;
  const auto n = domain_->size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = codomain_.norm(values_.col(i) - values_.col(j)) / domain_->distance(i, j);
      if (r > e.upper) {
        e.upper = r;
        bi = i;
        bj = j;
      }
    }
  }
  e.lower = e.upper;
  e.exact = true;
  if (n >= 2) {
    e.lower_cert = {{"type", "pair_ratio"},
                    {"pair", {domain_->name(bi), domain_->name(bj)}},
                    {"value", e.lower}};
  }
  e.upper_cert = {{"type", "pair_max"}, {"value", e.upper}};
  return e;
}

PointMap::PointMap(SpaceRef from, SpaceRef to, std::vector<std::size_t> image)
    : from_(std::move(from)), to_(std::move(to)), image_(std::move(image)) {
  if (image_.size() != from_->size()) throw InputError("point map needs one image per point");
  for (auto i : image_) {
    if (i >= to_->size()) throw InputError("point map image outside the target space");
  }
  if (image_[from_->base()] != to_->base()) throw InputError("point map must send base to base");
}

double PointMap::lip_constant() const {
  double lip = 0.0;
  for (std::size_t i = 0; i < from_->size(); ++i) {
    for (std::size_t j = i + 1; j < from_->size(); ++j) {
      lip = std::max(lip, to_->distance(image_[i], image_[j]) / from_->distance(i, j));
    }
  }
  return lip;
}

LinearOperator linearize(const LipschitzMap& T) {
  const auto& X = *T.domain();
  Matrix m(T.codomain().dim(), X.free_dim());
  for (int c = 0; c < X.free_dim(); ++c) {
    m.col(c) = T.values().col(static_cast<Eigen::Index>(X.point_of_coord(c)));
  }
  return LinearOperator::on_free_space(T.domain(), T.codomain(), std::move(m));
}

LipschitzFunctional transpose_apply(const LipschitzMap& T, const Vector& dual_vector) {
  if (dual_vector.size() != T.codomain().dim()) throw InputError("dual vector dimension mismatch");
  return LipschitzFunctional(T.domain(), T.values().transpose() * dual_vector);
}

LinearOperator beta_map(const SpaceRef& X, const Matrix& points, FinNormedSpace ambient) {
  if (points.rows() != ambient.dim() || points.cols() != static_cast<Eigen::Index>(X->size())) {
    throw InputError("point coordinates must be ambient.dim x |X|");
  }
  if (!points.col(static_cast<Eigen::Index>(X->base())).isZero(0.0)) {
    throw InputError("base point must sit at the origin");
  }
  for (std::size_t i = 0; i < X->size(); ++i) {
    for (std::size_t j = i + 1; j < X->size(); ++j) {
      const double induced = ambient.norm(points.col(i) - points.col(j));
      if (std::abs(induced - X->distance(i, j)) > 1e-9 * std::max(1.0, induced)) {
        throw InputError("metric of X is not induced by the ambient norm at (" +
                         X->name(i) + "," + X->name(j) + ")");
      }
    }
  }
  Matrix m(ambient.dim(), X->free_dim());
  for (int c = 0; c < X->free_dim(); ++c) {
    m.col(c) = points.col(static_cast<Eigen::Index>(X->point_of_coord(c)));
  }
  return LinearOperator::on_free_space(X, ambient, std::move(m));
}

LipschitzMap compose(const Matrix& u, Codomain codomain, const LipschitzMap& T) {
  if (u.cols() != T.codomain().dim() || u.rows() != codomain.dim()) {
    throw InputError("composition dimension mismatch");
  }
  return LipschitzMap(T.domain(), std::move(codomain), u * T.values());
}

LipschitzMap compose(const LipschitzMap& T, const PointMap& g) {
  if (!(g.to() == T.domain() || *g.to() == *T.domain())) {
    throw InputError("point map target is not the map's domain");
  }
  const auto n = g.from()->size();
  Matrix values(T.codomain().dim(), static_cast<Eigen::Index>(n));
  for (std::size_t z = 0; z < n; ++z) values.col(static_cast<Eigen::Index>(z)) = T.value(g(z));
  return LipschitzMap(g.from(), T.codomain(), std::move(values));
}

}  // namespace lipnorm
