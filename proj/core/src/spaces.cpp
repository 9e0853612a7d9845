#include "lipnorm/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "lipnorm/error.hpp"

namespace lipnorm {

std::string MetricViolation::describe() const {
  std::ostringstream os;
  os.precision(12);
  switch (kind) {
    case Kind::Diagonal:
      os << "diagonal d(" << i << "," << i << ") = " << slack << " != 0";
      break;
    case Kind::Symmetry:
      os << "symmetry d(" << i << "," << j << ") != d(" << j << "," << i
         << "), difference " << slack;
      break;
    case Kind::Positivity:
      os << "positivity d(" << i << "," << j << ") = " << slack << " <= 0";
      break;
    case Kind::Triangle:
      os << "triangle (" << i << "," << j << "," << k << "): d(" << i << ","
         << j << ") exceeds d(" << i << "," << k << ") + d(" << k << "," << j
         << ") by " << slack;
      break;
  }
  return os.str();
}

std::vector<MetricViolation> validate_metric(const Matrix& dist,
                                             std::size_t point_count) {
  using Kind = MetricViolation::Kind;
  if (static_cast<std::size_t>(dist.rows()) != point_count ||
      static_cast<std::size_t>(dist.cols()) != point_count) {
    throw InputError("distance matrix is " + std::to_string(dist.rows()) + "x" +
                     std::to_string(dist.cols()) + " but there are " +
                     std::to_string(point_count) + " points");
  }
  std::vector<MetricViolation> out;
  const auto n = point_count;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(dist(i, j))) {
        out.push_back({Kind::Positivity, i, j, 0, dist(i, j)});
      }
    }
  }
  if (!out.empty()) return out;

  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(dist(i, i)) > kMetricTol) {
      out.push_back({Kind::Diagonal, i, i, 0, dist(i, i)});
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double diff = std::abs(dist(i, j) - dist(j, i));
      if (diff > kMetricTol) out.push_back({Kind::Symmetry, i, j, 0, diff});
      if (dist(i, j) <= kMetricTol || dist(j, i) <= kMetricTol) {
        out.push_back({Kind::Positivity, i, j, 0, std::min(dist(i, j), dist(j, i))});
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const double slack = dist(i, j) - dist(i, k) - dist(k, j);
        if (slack > kMetricTol) out.push_back({Kind::Triangle, i, j, k, slack});
      }
    }
  }
  return out;
}

PointedMetricSpace::PointedMetricSpace(std::vector<std::string> names,
                                       Matrix dist, std::size_t base)
    : names_(std::move(names)), dist_(std::move(dist)), base_(base) {
  if (names_.empty()) throw InputError("metric space needs at least one point");
  if (base_ >= names_.size()) {
    throw InputError("base index " + std::to_string(base_) +
                     " out of range for " + std::to_string(names_.size()) +
                     " points");
  }
  for (std::size_t i = 0; i < names_.size(); ++i) {
    for (std::size_t j = i + 1; j < names_.size(); ++j) {
      if (names_[i] == names_[j]) throw InputError("duplicate point name '" + names_[i] + "'");
    }
  }
  const auto violations = validate_metric(dist_, names_.size());
  if (!violations.empty()) {
    std::string msg = "invalid metric: " + violations.front().describe();
    if (violations.size() > 1) {
      msg += " (and " + std::to_string(violations.size() - 1) + " more)";
    }
    throw InputError(msg);
  }
  // Symmetrize exactly; validation already bounded the asymmetry.
  dist_ = 0.5 * (dist_ + dist_.transpose()).eval();
  dist_.diagonal().setZero();
}

PointedMetricSpace PointedMetricSpace::from_matrix(Matrix dist) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < dist.rows(); ++i) names.push_back(std::to_string(i));
  return PointedMetricSpace(std::move(names), std::move(dist), 0);
}

PointedMetricSpace PointedMetricSpace::from_points(const Matrix& coords, Exponent q) {
  const auto n = coords.cols();
  if (n == 0) throw InputError("no points given");
  if (coords.col(0).norm() != 0.0) throw InputError("first point must be the origin");
  Matrix dist = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      dist(i, j) = dist(j, i) = lp_norm(coords.col(i) - coords.col(j), q);
    }
  }
  return from_matrix(std::move(dist));
}

std::optional<std::size_t> PointedMetricSpace::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t PointedMetricSpace::index_of(const std::string& name) const {
  auto idx = find(name);
  if (!idx) throw InputError("unknown point '" + name + "'");
  return *idx;
}

double PointedMetricSpace::min_distance() const {
  double m = INFINITY;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = i + 1; j < size(); ++j) m = std::min(m, dist_(i, j));
  }
  return m;
}

double PointedMetricSpace::max_distance() const {
  return size() < 2 ? 0.0 : dist_.maxCoeff();
}

int PointedMetricSpace::coord(std::size_t i) const {
  if (i == base_) return -1;
  return static_cast<int>(i < base_ ? i : i - 1);
}

std::size_t PointedMetricSpace::point_of_coord(int c) const {
  const auto u = static_cast<std::size_t>(c);
  return u < base_ ? u : u + 1;
}

bool PointedMetricSpace::operator==(const PointedMetricSpace& other) const {
  return names_ == other.names_ && base_ == other.base_ &&
         dist_.rows() == other.dist_.rows() && dist_ == other.dist_;
}

double lp_norm(const Vector& v, Exponent p) {
  if (v.size() == 0) return 0.0;
  if (p.is_infinite()) return v.cwiseAbs().maxCoeff();
  const double e = p.value();
  if (e == 1.0) return v.cwiseAbs().sum();
  if (e == 2.0) return v.norm();
  const double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return scale * std::pow((v.cwiseAbs() / scale).array().pow(e).sum(), 1.0 / e);
}

FinNormedSpace::FinNormedSpace(int dim, Exponent p) : dim_(dim), p_(p) {
  if (dim <= 0) throw InputError("normed space dimension must be positive");
}

bool FinNormedSpace::dual_ball_is_polytope() const {
  return p_.is_infinite() || p_.is(1.0);
}

double FinNormedSpace::norm(const Vector& v) const {
  if (v.size() != dim_) throw InputError("vector dimension mismatch");
  return lp_norm(v, p_);
}

double FinNormedSpace::dual_norm(const Vector& v) const {
  if (v.size() != dim_) throw InputError("vector dimension mismatch");
  return lp_norm(v, p_.conjugate());
}

Vector FinNormedSpace::norming_functional(const Vector& v) const {
  if (v.size() != dim_) throw InputError("vector dimension mismatch");
  Vector f = Vector::Zero(dim_);
  const double nv = norm(v);
  if (nv == 0.0) return f;
  if (p_.is_infinite()) {
    Eigen::Index j = 0;
    v.cwiseAbs().maxCoeff(&j);
    f(j) = v(j) > 0 ? 1.0 : -1.0;
    return f;
  }
  const double e = p_.value();
  if (e == 1.0) {
    for (int i = 0; i < dim_; ++i) f(i) = v(i) > 0 ? 1.0 : (v(i) < 0 ? -1.0 : 0.0);
    return f;
  }
  if (e == 2.0) return v / nv;
  for (int i = 0; i < dim_; ++i) {
    const double a = std::abs(v(i)) / nv;
    f(i) = (v(i) >= 0 ? 1.0 : -1.0) * std::pow(a, e - 1.0);
  }
  // Renormalize against rounding so the dual norm never exceeds one.
  const double nf = dual_norm(f);
  if (nf > 1.0) f /= nf;
  return f;
}

std::vector<Vector> FinNormedSpace::dual_ball_vertices() const {
  std::vector<Vector> out;
  if (p_.is_infinite()) {
    // Dual is l_1: vertices +/- e_j.
    for (int j = 0; j < dim_; ++j) out.push_back(Vector::Unit(dim_, j));
    return out;
  }
  if (p_.is(1.0)) {
    if (dim_ > kMaxEnumerationDim) {
      throw CapacityError("dual-ball vertex enumeration capped at dimension " +
                          std::to_string(kMaxEnumerationDim));
    }
    // Dual is l_inf: sign vectors, first coordinate fixed to +1.
    const unsigned long long count = 1ULL << (dim_ - 1);
    for (unsigned long long mask = 0; mask < count; ++mask) {
      Vector s = Vector::Ones(dim_);
      for (int j = 1; j < dim_; ++j) {
        if (mask & (1ULL << (j - 1))) s(j) = -1.0;
      }
      out.push_back(std::move(s));
    }
    return out;
  }
  throw InputError("dual unit ball of l_" + p_.to_string() + " is not a polytope");
}

VectorSequence VectorSequence::appended(const Vector& v) const {
  Matrix m(space.dim(), vectors.cols() + 1);
  m.leftCols(vectors.cols()) = vectors;
  m.col(vectors.cols()) = v;
  return {space, std::move(m)};
}

double strong_norm(const VectorSequence& seq, Exponent p) {
  Vector norms(seq.vectors.cols());
  for (Eigen::Index i = 0; i < seq.vectors.cols(); ++i) {
    norms(i) = seq.space.norm(seq.vectors.col(i));
  }
  return lp_norm(norms, p);
}

double weak_norm_at(const Matrix& vectors, const Vector& functional, Exponent p) {
  return lp_norm(vectors.transpose() * functional, p);
}

namespace {

Json functional_cert(const Vector& f) {
  return {{"type", "weak_functional"},
          {"functional", std::vector<double>(f.data(), f.data() + f.size())}};
}

// Nonlinear power iteration: repeatedly replace x* by the dual-ball point
// that maximizes the linearization of the convex objective at x*.
Vector ascend_weak(const Matrix& X, const FinNormedSpace& E, Exponent p,
                   Vector start, int iterations) {
  Vector f = start;
  double best = weak_norm_at(X, f, p);
  const double e = p.value();
  for (int it = 0; it < iterations; ++it) {
    Vector y = X.transpose() * f;
    Vector w(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double a = std::abs(y(i));
      w(i) = (y(i) >= 0 ? 1.0 : -1.0) * (e == 1.0 ? (a > 0 ? 1.0 : 0.0) : std::pow(a, e - 1.0));
    }
    Vector g = X * w;
    if (g.norm() == 0.0) break;
    Vector next = E.norming_functional(g);
    const double val = weak_norm_at(X, next, p);
    if (val <= best * (1.0 + 1e-13)) {
      if (val > best) { f = next; best = val; }
      break;
    }
    f = next;
    best = val;
  }
  return f;
}

}  // namespace

NormEstimate weak_norm(const VectorSequence& seq, Exponent p,
                       const WeakNormOptions& options) {
  const auto& E = seq.space;
  const Matrix& X = seq.vectors;
  NormEstimate est;
  est.quantity = "weak_l" + p.to_string();
  if (X.cols() == 0 || X.isZero(0.0)) return NormEstimate::zero(est.quantity);
  if (X.rows() != E.dim()) throw InputError("sequence dimension does not match space");

  if (p.is_infinite()) {
    Eigen::Index best = 0;
    double val = 0.0;
    for (Eigen::Index i = 0; i < X.cols(); ++i) {
      const double n = E.norm(X.col(i));
      if (n > val) { val = n; best = i; }
    }
    est.lower = est.upper = val;
    est.exact = true;
    est.lower_cert = functional_cert(E.norming_functional(X.col(best)));
    est.upper_cert = {{"type", "max_norm"}};
    return est;
  }

  if (E.dual_ball_is_polytope()) {
    Vector best_f;
    double best = -1.0;
    for (const auto& v : E.dual_ball_vertices()) {
      const double val = weak_norm_at(X, v, p);
      if (val > best) { best = val; best_f = v; }
    }
    est.lower = est.upper = best;
    est.exact = true;
    est.lower_cert = functional_cert(best_f);
    est.upper_cert = {{"type", "vertex_enumeration"}, {"vertices", E.dim()}};
    return est;
  }

  if (E.is_euclidean() && p.is(2.0)) {
    Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU);
    const double sigma = svd.singularValues()(0);
    Vector u = svd.matrixU().col(0);
    est.lower = weak_norm_at(X, u, p);
    est.upper = sigma;
    est.upper = std::max(est.upper, est.lower);
    est.exact = true;
    est.lower_cert = functional_cert(u);
    est.upper_cert = {{"type", "spectral"}, {"sigma_max", sigma}};
    return est;
  }

  // General case: seeded restarts of the power iteration for the lower side.
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector best_f = Vector::Zero(E.dim());
  double best = 0.0;
  auto try_start = [&](const Vector& start) {
    Vector f = ascend_weak(X, E, p, start, options.max_iterations);
    const double val = weak_norm_at(X, f, p);
    if (val > best) { best = val; best_f = f; }
  };
  for (Eigen::Index i = 0; i < X.cols(); ++i) try_start(E.norming_functional(X.col(i)));
  for (int r = 0; r < options.restarts; ++r) {
    Vector g(E.dim());
    for (int k = 0; k < E.dim(); ++k) g(k) = normal(rng);
    try_start(E.norming_functional(g));
  }
  est.lower = best;
  est.lower_cert = functional_cert(best_f);

  double upper = strong_norm(seq, p);
  std::string how = "holder";
  if (E.is_euclidean()) {
    Eigen::JacobiSVD<Matrix> svd(X);
    const double sigma = svd.singularValues()(0);
    const double e = p.value();
    const double factor = e >= 2.0 ? 1.0 : std::pow(static_cast<double>(X.cols()), 1.0 / e - 0.5);
    if (factor * sigma < upper) {
      upper = factor * sigma;
      how = "spectral_comparison";
    }
  }
  est.upper = std::max(upper, est.lower);
  est.exact = est.upper - est.lower <= kExactTol * std::max(1.0, est.upper);
  est.loose = !est.exact;
  est.upper_cert = {{"type", how}};
  return est;
}

}  // namespace lipnorm
