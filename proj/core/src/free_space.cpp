#include "lipnorm/free_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "lipnorm/error.hpp"
#include "lipnorm/lp.hpp"

namespace lipnorm {

namespace {

void require_same(const SpaceRef& a, const SpaceRef& b) {
  if (a != b && !(*a == *b)) throw InputError("operands live on different metric spaces");
}

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

FreeVector::FreeVector(SpaceRef space, Vector coeffs)
    : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw InputError("free vector needs a metric space");
  if (coeffs_.size() != space_->free_dim()) {
    throw InputError("free vector has " + std::to_string(coeffs_.size()) +
                     " coefficients, space has " + std::to_string(space_->free_dim()) +
                     " non-base points");
  }
}

FreeVector FreeVector::zero(SpaceRef space) {
  const int n = space->free_dim();
  return FreeVector(std::move(space), Vector::Zero(n));
}

FreeVector FreeVector::point(SpaceRef space, std::size_t x) {
  FreeVector m = zero(space);
  const int c = space->coord(x);
  if (c >= 0) m.coeffs_(c) = 1.0;
  return m;
}

double FreeVector::coeff_at(std::size_t x) const {
  const int c = space_->coord(x);
  return c >= 0 ? coeffs_(c) : -coeffs_.sum();
}

Vector FreeVector::balanced() const {
  Vector out(space_->size());
  for (std::size_t x = 0; x < space_->size(); ++x) out(static_cast<Eigen::Index>(x)) = coeff_at(x);
  return out;
}

FreeVector FreeVector::canonical() const {
  Vector c = coeffs_;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (std::abs(c(i)) < kCoeffZeroTol) c(i) = 0.0;
  }
  return FreeVector(space_, std::move(c));
}

bool FreeVector::is_zero() const { return canonical().coeffs_.isZero(0.0); }

FreeVector FreeVector::operator+(const FreeVector& other) const {
  require_same(space_, other.space_);
  return FreeVector(space_, coeffs_ + other.coeffs_);
}

FreeVector FreeVector::operator-(const FreeVector& other) const {
  require_same(space_, other.space_);
  return FreeVector(space_, coeffs_ - other.coeffs_);
}

FreeVector FreeVector::operator*(double s) const { return FreeVector(space_, coeffs_ * s); }

FreeVector molecule(const SpaceRef& space, std::size_t x, std::size_t y) {
  if (x >= space->size() || y >= space->size()) throw InputError("molecule point out of range");
  if (x == y) throw InputError("degenerate molecule: x and y coincide");
  return FreeVector::point(space, x) - FreeVector::point(space, y);
}

LipschitzFunctional::LipschitzFunctional(SpaceRef space, Vector values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != static_cast<Eigen::Index>(space_->size())) {
    throw InputError("functional needs one value per point");
  }
  if (values_(static_cast<Eigen::Index>(space_->base())) != 0.0) {
    throw InputError("Lipschitz functional must vanish at the base point");
  }
}

LipschitzFunctional LipschitzFunctional::from_coords(SpaceRef space, const Vector& coords) {
  if (coords.size() != space->free_dim()) throw InputError("coordinate count mismatch");
  Vector v = Vector::Zero(space->size());
  for (int c = 0; c < space->free_dim(); ++c) {
    v(static_cast<Eigen::Index>(space->point_of_coord(c))) = coords(c);
  }
  return LipschitzFunctional(std::move(space), std::move(v));
}

LipschitzFunctional LipschitzFunctional::zero(SpaceRef space) {
  const auto n = static_cast<Eigen::Index>(space->size());
  return LipschitzFunctional(std::move(space), Vector::Zero(n));
}

Vector LipschitzFunctional::coords() const {
  Vector c(space_->free_dim());
  for (int k = 0; k < space_->free_dim(); ++k) {
    c(k) = values_(static_cast<Eigen::Index>(space_->point_of_coord(k)));
  }
  return c;
}

double LipschitzFunctional::lip_constant() const {
  double lip = 0.0;
  for (std::size_t i = 0; i < space_->size(); ++i) {
    for (std::size_t j = i + 1; j < space_->size(); ++j) {
      lip = std::max(lip, std::abs(values_(i) - values_(j)) / space_->distance(i, j));
    }
  }
  return lip;
}

double pair(const LipschitzFunctional& f, const FreeVector& m) {
  require_same(f.space(), m.space());
  return f.coords().dot(m.coeffs());
}

AeNormResult ae_norm(const FreeVector& input) {
  const FreeVector m = input.canonical();
  const auto& X = *m.space();
  const auto n = static_cast<int>(X.size());
  AeNormResult res{NormEstimate::zero("ae_norm"), Matrix::Zero(n, n),
                   LipschitzFunctional::zero(m.space())};
  res.estimate.upper_cert = {{"type", "ae_flow"}, {"flow", Json::array()}};
  if (m.coeffs().isZero(0.0) || n < 2) {
    res.estimate.upper_cert["flow"] = Json::array();
    for (int i = 0; i < n; ++i) res.estimate.upper_cert["flow"].push_back(std::vector<double>(n, 0.0));
    res.estimate.lower_cert = {{"type", "lip_functional"}, {"values", std::vector<double>(n, 0.0)}};
    return res;
  }

  // Variables: flow over ordered pairs (i, j), i != j. Rows: net outflow at
  // each non-base point equals its coefficient; the base row is implied.
  std::vector<std::pair<int, int>> arcs;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) arcs.emplace_back(i, j);
    }
  }
  const int rows = X.free_dim();
  lp::LinearProgram prog;
  prog.cost.resize(static_cast<Eigen::Index>(arcs.size()));
  prog.A = Matrix::Zero(rows, static_cast<Eigen::Index>(arcs.size()));
  prog.rhs = m.coeffs();
  prog.sense.assign(rows, lp::RowSense::Equal);
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    const auto [i, j] = arcs[a];
    prog.cost(static_cast<Eigen::Index>(a)) = X.distance(i, j);
    const int ci = X.coord(i);
    const int cj = X.coord(j);
    if (ci >= 0) prog.A(ci, static_cast<Eigen::Index>(a)) += 1.0;
    if (cj >= 0) prog.A(cj, static_cast<Eigen::Index>(a)) -= 1.0;
  }
  const auto sol = lp::solve(prog);
  if (sol.status != lp::Status::Optimal) {
    throw InternalError(std::string("transportation LP failed: ") + lp::to_string(sol.status));
  }
  const double scale = std::max(1.0, m.coeffs().cwiseAbs().sum() * X.max_distance());
  if (sol.check.worst() > kExactTol * scale) {
    throw InternalError("transportation LP certificate residual " +
                        std::to_string(sol.check.worst()));
  }
  for (std::size_t a = 0; a < arcs.size(); ++a) {
    res.flow(arcs[a].first, arcs[a].second) = sol.x(static_cast<Eigen::Index>(a));
  }
  res.potential = LipschitzFunctional::from_coords(m.space(), sol.y);

  double upper = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) upper += res.flow(i, j) * X.distance(i, j);
  }
  const double lower = pair(res.potential, m);
  auto& est = res.estimate;
  est.lower = std::min(lower, upper);
  est.upper = upper;
  est.exact = std::abs(upper - lower) <= kExactTol * scale &&
              res.potential.lip_constant() <= 1.0 + kExactTol;
  est.upper_cert["flow"] = Json::array();
  for (int i = 0; i < n; ++i) est.upper_cert["flow"].push_back(to_std(res.flow.row(i).transpose()));
  est.lower_cert = {{"type", "lip_functional"}, {"values", to_std(res.potential.values())}};
  return res;
}

KrDualResult ae_dual_norm(const FreeVector& input) {
  const FreeVector m = input.canonical();
  const auto& X = *m.space();
  const int k = X.free_dim();
  KrDualResult res{0.0, LipschitzFunctional::zero(m.space())};
  if (k == 0 || m.coeffs().isZero(0.0)) return res;

  // f = fp - fm, both >= 0. maximize c.f  ==  minimize -c.fp + c.fm.
  lp::LinearProgram prog;
  prog.cost.resize(2 * k);
  prog.cost.head(k) = -m.coeffs();
  prog.cost.tail(k) = m.coeffs();
  std::vector<Vector> rows;
  std::vector<double> rhs;
  const auto n = X.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      Vector r = Vector::Zero(2 * k);
      const int ci = X.coord(i);
      const int cj = X.coord(j);
      if (ci >= 0) { r(ci) += 1.0; r(k + ci) -= 1.0; }
      if (cj >= 0) { r(cj) -= 1.0; r(k + cj) += 1.0; }
      rows.push_back(std::move(r));
      rhs.push_back(X.distance(i, j));
    }
  }
  prog.A.resize(static_cast<Eigen::Index>(rows.size()), 2 * k);
  prog.rhs.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    prog.A.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    prog.rhs(static_cast<Eigen::Index>(r)) = rhs[r];
  }
  prog.sense.assign(rows.size(), lp::RowSense::LessEqual);
  const auto sol = lp::solve(prog);
  if (sol.status != lp::Status::Optimal) {
    throw InternalError(std::string("Kantorovich dual LP failed: ") + lp::to_string(sol.status));
  }
  const Vector f = sol.x.head(k) - sol.x.tail(k);
  res.maximizer = LipschitzFunctional::from_coords(m.space(), f);
  res.value = pair(res.maximizer, m);
  return res;
}

std::vector<LipschitzFunctional> lip_ball_vertices(const SpaceRef& space) {
  const auto& X = *space;
  const std::size_t n = X.size();
  if (n > kMaxVertexPoints) {
    throw CapacityError("Lipschitz-ball vertex enumeration capped at " +
                        std::to_string(kMaxVertexPoints) + " points");
  }
  if (n == 1) return {LipschitzFunctional::zero(space)};

  // A vertex has a connected graph of tight constraints through the base, so
  // it is reached by growing tight values outward from the base point.
  using Key = std::pair<unsigned, std::vector<long long>>;
  auto key_of = [&](unsigned mask, const Vector& vals) {
    std::vector<long long> k;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) k.push_back(std::llround(vals(static_cast<Eigen::Index>(i)) * 1e9));
    }
    return Key{mask, std::move(k)};
  };
  std::map<Key, Vector> level;
  {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    const unsigned mask = 1u << X.base();
    level.emplace(key_of(mask, v), v);
  }
  const double tol = 1e-12 * std::max(1.0, X.max_distance());
  constexpr std::size_t kMaxStates = 4'000'000;
  for (std::size_t step = 1; step < n; ++step) {
    std::map<Key, Vector> next;
    for (const auto& [key, vals] : level) {
      const unsigned mask = key.first;
      for (std::size_t z = 0; z < n; ++z) {
        if (mask & (1u << z)) continue;
        for (std::size_t s = 0; s < n; ++s) {
          if (!(mask & (1u << s))) continue;
          for (double sign : {1.0, -1.0}) {
            const double fz = vals(static_cast<Eigen::Index>(s)) + sign * X.distance(s, z);
            bool ok = true;
            for (std::size_t t = 0; t < n && ok; ++t) {
              if (!(mask & (1u << t))) continue;
              ok = std::abs(fz - vals(static_cast<Eigen::Index>(t))) <= X.distance(z, t) + tol;
            }
            if (!ok) continue;
            Vector nv = vals;
            nv(static_cast<Eigen::Index>(z)) = fz;
            const unsigned nmask = mask | (1u << z);
            next.emplace(key_of(nmask, nv), std::move(nv));
          }
        }
      }
      if (next.size() > kMaxStates) {
        throw CapacityError("Lipschitz-ball vertex enumeration exceeded state cap");
      }
    }
    level = std::move(next);
  }

  std::vector<LipschitzFunctional> out;
  const int dim = X.free_dim();
  for (const auto& [key, vals] : level) {
    LipschitzFunctional f(space, vals);
    if (f.lip_constant() > 1.0 + 1e-9) throw InternalError("enumerated vertex violates Lip <= 1");
    // Rank of the tight constraint rows.
    std::vector<Vector> tight;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (std::abs(std::abs(vals(i) - vals(j)) - X.distance(i, j)) > 1e-9 * X.distance(i, j)) continue;
        Vector r = Vector::Zero(dim);
        if (X.coord(i) >= 0) r(X.coord(i)) += 1.0;
        if (X.coord(j) >= 0) r(X.coord(j)) -= 1.0;
        tight.push_back(std::move(r));
      }
    }
    Matrix T(static_cast<Eigen::Index>(tight.size()), dim);
    for (std::size_t r = 0; r < tight.size(); ++r) T.row(static_cast<Eigen::Index>(r)) = tight[r].transpose();
    if (Eigen::FullPivLU<Matrix>(T).rank() != dim) {
      throw InternalError("enumerated point is not a vertex of the Lipschitz ball");
    }
    out.push_back(std::move(f));
  }
  return out;
}

LipBall::LipBall(const SpaceRef& space) : space_(space) {
  const auto all = lip_ball_vertices(space);
  const int dim = space->free_dim();
  std::vector<Vector> kept;
  std::set<std::vector<long long>> seen;
  for (const auto& f : all) {
    Vector c = f.coords();
    std::vector<long long> k, neg;
    for (int i = 0; i < dim; ++i) {
      k.push_back(std::llround(c(i) * 1e9));
      neg.push_back(-std::llround(c(i) * 1e9));
    }
    if (seen.count(neg)) continue;
    seen.insert(k);
    kept.push_back(std::move(c));
  }
  vertices_.resize(dim, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t i = 0; i < kept.size(); ++i) vertices_.col(static_cast<Eigen::Index>(i)) = kept[i];
}

double LipBall::support(const Vector& m) const {
  if (vertices_.cols() == 0) return 0.0;
  return (vertices_.transpose() * m).cwiseAbs().maxCoeff();
}

Eigen::Index LipBall::argmax(const Vector& m) const {
  Eigen::Index idx = 0;
  (vertices_.transpose() * m).cwiseAbs().maxCoeff(&idx);
  return idx;
}

double LipBall::weak_norm_value(const Matrix& coords, Exponent p) const {
  double best = 0.0;
  const Matrix vals = vertices_.transpose() * coords;  // K x N
  for (Eigen::Index k = 0; k < vals.rows(); ++k) {
    best = std::max(best, lp_norm(vals.row(k).transpose(), p));
  }
  return best;
}

NormEstimate LipBall::weak_norm(const Matrix& coords, Exponent p) const {
  NormEstimate e;
  e.quantity = "free_weak_l" + p.to_string();
  const Matrix vals = vertices_.transpose() * coords;
  Eigen::Index best_k = 0;
  double best = 0.0;
  for (Eigen::Index k = 0; k < vals.rows(); ++k) {
    const double v = lp_norm(vals.row(k).transpose(), p);
    if (v > best) { best = v; best_k = k; }
  }
  e.lower = e.upper = best;
  e.exact = true;
  if (vertices_.cols() > 0) {
    const Vector f = vertices_.col(best_k);
    e.lower_cert = {{"type", "weak_functional"}, {"functional", to_std(f)}};
  }
  e.upper_cert = {{"type", "lip_vertex_enumeration"}, {"vertices", vertices_.cols()}};
  return e;
}

}  // namespace lipnorm
