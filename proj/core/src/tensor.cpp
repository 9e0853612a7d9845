#include "lipnorm/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "lipnorm/error.hpp"

namespace lipnorm {

TensorElement::TensorElement(SpaceRef space, FinNormedSpace factor, std::vector<TensorTerm> terms)
    : space_(std::move(space)), factor_(factor) {
  for (auto& t : terms) {
    if (t.x >= space_->size() || t.y >= space_->size()) {
      throw InputError("tensor term refers to a point outside the space");
    }
    if (t.e.size() != factor_.dim()) throw InputError("tensor term vector has wrong dimension");
    if (t.x == t.y || t.e.cwiseAbs().maxCoeff() == 0.0) continue;
    terms_.push_back(std::move(t));
  }
}

TensorElement TensorElement::from_matrix(SpaceRef space, FinNormedSpace factor, const Matrix& M) {
  if (M.rows() != space->free_dim() || M.cols() != factor.dim()) {
    throw InputError("tensor matrix must be (|X|-1) x dim E");
  }
  std::vector<TensorTerm> terms;
  for (int c = 0; c < space->free_dim(); ++c) {
    terms.push_back({space->point_of_coord(c), space->base(), M.row(c).transpose()});
  }
  return TensorElement(std::move(space), factor, std::move(terms));
}

TensorElement TensorElement::operator+(const TensorElement& other) const {
  if (!(*space_ == *other.space_) || !(factor_ == other.factor_)) {
    throw InputError("tensor elements live in different spaces");
  }
  auto terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  return TensorElement(space_, factor_, std::move(terms));
}

TensorElement TensorElement::operator-() const { return *this * -1.0; }

TensorElement TensorElement::operator*(double s) const {
  auto terms = terms_;
  for (auto& t : terms) t.e *= s;
  return TensorElement(space_, factor_, std::move(terms));
}

TensorImage TensorImage::from_pairs(SpaceRef space, FinNormedSpace factor,
                                    std::vector<std::pair<FreeVector, Vector>> pairs) {
  Matrix m = Matrix::Zero(space->free_dim(), factor.dim());
  for (const auto& [mv, e] : pairs) {
    if (!(*mv.space() == *space)) throw InputError("free vector lives on a different space");
    if (e.size() != factor.dim()) throw InputError("tensor vector has wrong dimension");
    m.noalias() += mv.coeffs() * e.transpose();
  }
  return TensorImage{std::move(space), factor, std::move(pairs), std::move(m)};
}

TensorImage phi(const TensorElement& u) {
  std::vector<std::pair<FreeVector, Vector>> pairs;
  for (const auto& t : u.terms()) pairs.emplace_back(molecule(u.space(), t.x, t.y), t.e);
  return TensorImage::from_pairs(u.space(), u.factor(), std::move(pairs));
}

double pair_with_map(const LipschitzMap& T, const TensorElement& u) {
  if (!(*T.domain() == *u.space())) throw InputError("map and tensor live on different spaces");
  if (T.codomain().is_free() || !(T.codomain().normed() == u.factor().dual())) {
    throw InputError("map codomain must be the dual of the tensor's factor space");
  }
  double s = 0.0;
  for (const auto& t : u.terms()) s += (T.value(t.x) - T.value(t.y)).dot(t.e);
  return s;
}

const char* to_string(CrossNorm kind) {
  switch (kind) {
    case CrossNorm::Projective: return "piL";
    case CrossNorm::Injective: return "epsL";
    case CrossNorm::Dp: return "dpL";
    case CrossNorm::Gp: return "gpL";
    case CrossNorm::Mu: return "mu";
    case CrossNorm::Cs: return "cs";
  }
  return "?";
}

CrossNorm parse_cross_norm(const std::string& name) {
  for (auto k : {CrossNorm::Projective, CrossNorm::Injective, CrossNorm::Dp, CrossNorm::Gp,
                 CrossNorm::Mu, CrossNorm::Cs}) {
    if (name == to_string(k)) return k;
  }
  throw InputError("unknown cross-norm '" + name + "' (expected piL, epsL, dpL, gpL, mu or cs)");
}

namespace {

double strong_free(const LipBall& ball, const Matrix& left, Exponent q) {
  Vector norms(left.cols());
  for (Eigen::Index i = 0; i < left.cols(); ++i) norms(i) = ball.support(left.col(i));
  return lp_norm(norms, q);
}

double strong_factor(const FinNormedSpace& E, const Matrix& right, Exponent q) {
  Vector norms(right.cols());
  for (Eigen::Index i = 0; i < right.cols(); ++i) norms(i) = E.norm(right.col(i));
  return lp_norm(norms, q);
}

double weak_factor(const FinNormedSpace& E, const Matrix& right, Exponent p) {
  if (right.cols() == 0) return 0.0;
  return weak_norm(VectorSequence{E, right}, p).upper;
}

}  // namespace

double rep_value(CrossNorm kind, const LipBall& ball, const FinNormedSpace& factor,
                 const Matrix& left, const Matrix& right, Exponent p) {
  if (left.cols() != right.cols()) throw InputError("representation factors differ in length");
  switch (kind) {
    case CrossNorm::Projective: {
      double v = 0.0;
      for (Eigen::Index i = 0; i < left.cols(); ++i) {
        v += ball.support(left.col(i)) * factor.norm(right.col(i));
      }
      return v;
    }
    case CrossNorm::Dp:
      return ball.weak_norm_value(left, p) * strong_factor(factor, right, p.conjugate());
    case CrossNorm::Gp:
    case CrossNorm::Mu:
      return strong_free(ball, left, p.conjugate()) * weak_factor(factor, right, p);
    case CrossNorm::Cs:
      return ball.weak_norm_value(left, p.conjugate()) * strong_factor(factor, right, p);
    case CrossNorm::Injective:
      break;
  }
  throw InputError("the injective norm has no representation objective");
}

Matrix molecule_rep_matrix(const PointedMetricSpace& X, const MoleculeRep& rep) {
  Matrix m = Matrix::Zero(X.free_dim(), rep.vectors.rows());
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    const int cx = X.coord(rep.pairs[i].first), cy = X.coord(rep.pairs[i].second);
    const auto col = rep.vectors.col(static_cast<Eigen::Index>(i)).transpose();
    if (cx >= 0) m.row(cx) += col;
    if (cy >= 0) m.row(cy) -= col;
  }
  return m;
}

double molecule_rep_value(CrossNorm kind, const LipBall& ball, const FinNormedSpace& factor,
                          const MoleculeRep& rep, Exponent p) {
  if (kind != CrossNorm::Mu && kind != CrossNorm::Cs) {
    throw InputError("molecule representations are scored for mu and cs only");
  }
  const auto n = static_cast<Eigen::Index>(rep.pairs.size());
  if (rep.multiplicity.size() != n || rep.vectors.cols() != n) {
    throw InputError("molecule representation has inconsistent lengths");
  }
  // s copies of delta [x] E/s equal one term (s^(1/p*) delta) [x] (s^(-1/p*) E) for
  // both objectives, so the general-representation formula applies.
  const Exponent q = p.conjugate();
  const auto& X = *ball.space();
  Matrix left = Matrix::Zero(X.free_dim(), n);
  Matrix right(factor.dim(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = rep.multiplicity(i);
    if (!(s > 0.0)) throw InputError("molecule multiplicities must be positive");
    const double c = q.is_infinite() ? 1.0 : std::pow(s, 1.0 / q.value());
    const auto [x, y] = rep.pairs[static_cast<std::size_t>(i)];
    if (X.coord(x) >= 0) left(X.coord(x), i) = c;
    if (X.coord(y) >= 0) left(X.coord(y), i) = -c;
    right.col(i) = rep.vectors.col(i) / c;
  }
  return rep_value(kind, ball, factor, left, right, p);
}

NormEstimate proj_norm_l(const TensorElement& u, const TensorOptions& options) {
  return cross_norm(CrossNorm::Projective, u.space(), u.factor(), phi(u).matrix,
                    Exponent::finite(2.0), options);
}
NormEstimate inj_norm_l(const TensorElement& u, const TensorOptions& options) {
  return cross_norm(CrossNorm::Injective, u.space(), u.factor(), phi(u).matrix,
                    Exponent::finite(2.0), options);
}
NormEstimate dp_norm_l(const TensorElement& u, Exponent p, const TensorOptions& options) {
  return cross_norm(CrossNorm::Dp, u.space(), u.factor(), phi(u).matrix, p, options);
}
NormEstimate gp_norm_l(const TensorElement& u, Exponent p, const TensorOptions& options) {
  return cross_norm(CrossNorm::Gp, u.space(), u.factor(), phi(u).matrix, p, options);
}
NormEstimate mu_norm(const TensorElement& u, Exponent p, const TensorOptions& options) {
  return cross_norm(CrossNorm::Mu, u.space(), u.factor(), phi(u).matrix, p, options);
}
NormEstimate cs_norm(const TensorElement& u, Exponent p, const TensorOptions& options) {
  return cross_norm(CrossNorm::Cs, u.space(), u.factor(), phi(u).matrix, p, options);
}

}  // namespace lipnorm
