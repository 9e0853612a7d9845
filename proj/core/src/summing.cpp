// Summing-norm estimators. Upper bounds are Pietsch domination certificates,
// Hilbert densities or nuclear representations; lower bounds are explicit
// finite sequences whose ratio is recomputed from scratch.

#include "lipnorm/summing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lipnorm/error.hpp"
#include "lipnorm/json_io.hpp"
#include "lipnorm/lp.hpp"
#include "lipnorm/transport.hpp"

namespace lipnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Sign vectors are enumerated up to this dimension when used as candidates.
constexpr int kMaxSignDim = 16;

void finish(NormEstimate& e) {
  e.exact = e.upper - e.lower <= kExactTol * std::max(1.0, e.upper);
  e.loose = !e.exact && e.relative_width() > kSearchRelWidth;
}

Matrix sign_vectors(int dim) {
  if (dim > kMaxSignDim) {
    throw CapacityError("sign-vector enumeration capped at dimension " +
                        std::to_string(kMaxSignDim));
  }
  const Eigen::Index count = Eigen::Index{1} << (dim - 1);
  Matrix s = Matrix::Ones(dim, count);
  for (Eigen::Index mask = 0; mask < count; ++mask) {
    for (int j = 1; j < dim; ++j) {
      if (mask & (Eigen::Index{1} << (j - 1))) s(j, mask) = -1.0;
    }
  }
  return s;
}

Matrix stack(const std::vector<Vector>& cols, Eigen::Index rows) {
  Matrix m(rows, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cols[i];
  return m;
}

Matrix hcat(const Matrix& a, const Matrix& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  Matrix m(a.rows(), a.cols() + b.cols());
  m << a, b;
  return m;
}

// ------------------------------------------------------------------- domain

// Either F(X) (Arens-Eells norm) or an l_q space.
struct Domain {
  SpaceRef free;
  // Built on first use; op norms only need molecules.
  mutable std::shared_ptr<const LipBall> ball_cache;
  std::optional<FinNormedSpace> normed;
  int dim = 0;

  static Domain of(const LinearOperator& u) {
    Domain d;
    d.dim = u.domain_dim();
    if (u.domain_is_free()) {
      d.free = u.free_domain();
    } else {
      d.normed = u.normed_domain();
    }
    return d;
  }

  // Null above the vertex cap.
  const LipBall* ball() const {
    if (!free || free->size() > kMaxVertexPoints) return nullptr;
    if (!ball_cache) ball_cache = std::make_shared<const LipBall>(free);
    return ball_cache.get();
  }

  double norm(const Vector& x) const {
    if (normed) return normed->norm(x);
    if (const LipBall* b = ball()) return b->support(x);
    return ae_norm(FreeVector(free, x)).estimate.upper;
  }

  double dual_norm(const Vector& f) const {
    if (normed) return normed->dual_norm(f);
    return LipschitzFunctional::from_coords(free, f).lip_constant();
  }

  // Weak l_p norm of the columns: exact where available, else an upper bound.
  double weak(const Matrix& seq, Exponent p) const {
    if (seq.cols() == 0) return 0.0;
    if (const LipBall* b = ball()) return b->weak_norm_value(seq, p);
    if (normed) {
      WeakNormOptions o;
      o.restarts = 4;
      o.max_iterations = 100;
      return weak_norm(VectorSequence{*normed, seq}, p, o).upper;
    }
    Vector n(seq.cols());
    for (Eigen::Index i = 0; i < seq.cols(); ++i) n(i) = norm(seq.col(i));
    return lp_norm(n, p);
  }

  // Dual-ball vertices when the dual ball is a known polytope.
  Matrix dual_vertices() const {
    if (const LipBall* b = ball()) return b->vertices();
    if (normed && normed->dual_ball_is_polytope()) {
      return stack(normed->dual_ball_vertices(), dim);
    }
    return Matrix(dim, 0);
  }

  bool has_extreme_points() const {
    if (free) return true;
    const Exponent q = normed->exponent();
    return q.is(1.0) || (q.is_infinite() && dim <= kMaxSignDim);
  }

  // Extreme points of the unit ball, one per +/- pair.
  Matrix extreme_points() const {
    if (free) {
      const auto pairs = point_pairs(*free);
      Matrix m = molecule_matrix(*free);
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        m.col(static_cast<Eigen::Index>(q)) /= free->distance(pairs[q].first, pairs[q].second);
      }
      return m;
    }
    if (normed->exponent().is(1.0)) return Matrix::Identity(dim, dim);
    return sign_vectors(dim);
  }

  // A unit point x of the domain ball with f(x) close to the dual norm of f.
  Vector norming_point(const Vector& f) const {
    if (normed) {
      const FinNormedSpace dual = normed->dual();
      return dual.norming_functional(f);
    }
    const Matrix ext = extreme_points();
    Eigen::Index j = 0;
    (ext.transpose() * f).cwiseAbs().maxCoeff(&j);
    const double s = ext.col(j).dot(f) >= 0 ? 1.0 : -1.0;
    return s * ext.col(j);
  }

  // A dual-ball point norming x.
  Vector norming_functional(const Vector& x) const {
    if (normed) return normed->norming_functional(x);
    if (const LipBall* b = ball()) {
      const Eigen::Index j = b->argmax(x);
      const double s = b->vertices().col(j).dot(x) >= 0 ? 1.0 : -1.0;
      return s * b->vertices().col(j);
    }
    return ae_dual_norm(FreeVector(free, x)).maximizer.coords();
  }
};

// The adjoint u* : G* -> D*, with ||u* z||_{D*} = max over extreme points x
// of |<z, u x>| when the domain ball is polyhedral.
struct Adjoint {
  const LinearOperator& u;
  const Domain& D;
  bool polyhedral = false;
  Matrix images;  // u applied to the extreme points
  Matrix ymols;   // normalized molecules of Y when G = F(Y): the ball of G

  Adjoint(const LinearOperator& op, const Domain& dom) : u(op), D(dom) {
    polyhedral = D.has_extreme_points();
    images = polyhedral ? Matrix(u.matrix() * D.extreme_points()) : Matrix(u.codomain().dim(), 0);
    if (u.codomain().is_free()) {
      const auto& Y = *u.codomain().free();
      const auto pairs = point_pairs(Y);
      ymols = molecule_matrix(Y);
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        ymols.col(static_cast<Eigen::Index>(q)) /= Y.distance(pairs[q].first, pairs[q].second);
      }
    }
  }

  double norm(const Vector& z) const {
    if (polyhedral) return (images.transpose() * z).cwiseAbs().maxCoeff();
    return D.dual_norm(u.matrix().transpose() * z);
  }

  // Weak l_p norm in G*. For G = F(Y) the functionals on G* that matter are
  // the extreme points of the ball of F(Y), so the maximum is exact.
  double weak(const Matrix& z, Exponent q) const {
    if (z.cols() == 0) return 0.0;
    if (u.codomain().is_free()) {
      const Matrix vals = ymols.transpose() * z;
      double best = 0.0;
      for (Eigen::Index r = 0; r < vals.rows(); ++r) {
        best = std::max(best, lp_norm(vals.row(r).transpose(), q));
      }
      return best;
    }
    WeakNormOptions wo;
    wo.restarts = 4;
    return weak_norm(VectorSequence{u.codomain().normed().dual(), z}, q, wo).upper;
  }

  double ratio(const Matrix& z, Exponent q) const {
    if (z.cols() == 0) return 0.0;
    Vector n(z.cols());
    for (Eigen::Index i = 0; i < z.cols(); ++i) n(i) = norm(z.col(i));
    const double w = weak(z, q);
    return w > 0 ? lp_norm(n, q) / w : 0.0;
  }
};

// --------------------------------------------------------- sequence search

struct SequenceProblem {
  std::function<double(const Vector&)> image_norm;
  std::function<double(const Matrix&)> weak;
  Exponent p = Exponent::finite(2.0);
  int dim = 0;

  double ratio(const Matrix& s) const {
    if (s.cols() == 0) return 0.0;
    Vector n(s.cols());
    for (Eigen::Index i = 0; i < s.cols(); ++i) n(i) = image_norm(s.col(i));
    const double w = weak(s);
    if (!(w > 0.0)) return 0.0;
    return lp_norm(n, p) / w;
  }
};

struct SequenceBest {
  Matrix sequence;
  double value = 0.0;
};

SequenceBest hill_climb(const SequenceProblem& prob, Matrix s, Rng& rng, int steps) {
  SequenceBest best{s, prob.ratio(s)};
  double step = 0.3;
  std::uniform_int_distribution<Eigen::Index> pick(0, std::max<Eigen::Index>(0, s.cols() - 1));
  for (int it = 0; it < steps && s.cols() > 0; ++it) {
    const Eigen::Index i = pick(rng);
    Matrix trial = best.sequence;
    const double scale = std::max(trial.col(i).norm(), 1e-3);
    trial.col(i) += step * scale * gaussian_vector(rng, trial.rows());
    const double v = prob.ratio(trial);
    if (v > best.value) {
      best = {std::move(trial), v};
      step = std::min(2.0, step * 1.3);
    } else {
      step = std::max(1e-4, step * 0.8);
    }
  }
  return best;
}

SequenceBest search_sequences(const SequenceProblem& prob, const std::vector<Matrix>& starts,
                              const SummingOptions& o, std::size_t work_per_eval) {
  // Keep the total budget near 1e8 flops whatever the size of the weak-norm evaluation.
  const int steps = static_cast<int>(std::clamp<double>(
      2e6 / static_cast<double>(std::max<std::size_t>(work_per_eval, 1) *
                                static_cast<std::size_t>(std::max(o.restarts, 1))),
      10.0, 150.0));
  std::vector<SequenceBest> found(starts.size() + static_cast<std::size_t>(std::max(o.restarts, 0)));
  const int total = static_cast<int>(found.size());
  const int max_len = std::max(1, 4 * prob.dim);
  parallel_for(total, o.threads, [&](int r) {
    Rng rng = make_rng(o.seed, static_cast<unsigned long long>(r) + 1000);
    if (r < static_cast<int>(starts.size())) {
      const Matrix& s = starts[static_cast<std::size_t>(r)];
      found[static_cast<std::size_t>(r)] = hill_climb(prob, s, rng, s.cols() <= max_len ? steps : 0);
      return;
    }
    const int idx = r - static_cast<int>(starts.size());
    const Eigen::Index len = 1 + idx % max_len;
    found[static_cast<std::size_t>(r)] = hill_climb(prob, gaussian_matrix(rng, prob.dim, len), rng, steps);
  });
  SequenceBest best;
  for (auto& f : found) {
    if (f.value > best.value) best = std::move(f);
  }
  return best;
}

Json sequence_cert(const Matrix& seq, Exponent p, double value) {
  return {{"type", "sequence_witness"}, {"p", p.is_infinite() ? Json("inf") : Json(p.value())},
          {"sequence", json_columns(seq)}, {"value", value}};
}

Json pietsch_cert(const pietsch::Certificate& c) {
  return {{"type", "pietsch_l2"},
          {"functionals", json_columns(c.functionals)},
          {"weights", json_vector(c.weights)},
          {"constant", c.constant},
          {"value", c.constant}};
}

// ------------------------------------------------------------- operators

std::vector<Matrix> canonical_starts(const Domain& D, const Matrix& u) {
  std::vector<Matrix> starts;
  starts.push_back(Matrix::Identity(D.dim, D.dim));
  Eigen::JacobiSVD<Matrix> svd(u, Eigen::ComputeThinV);
  starts.push_back(svd.matrixV());
  for (Eigen::Index i = 0; i < svd.matrixV().cols(); ++i) {
    if (svd.singularValues()(i) > 0) starts.push_back(D.norming_point(svd.matrixV().col(i)));
  }
  if (D.free) {
    if (D.free->size() <= 16) starts.push_back(D.extreme_points());
    // Rademacher sums of normalized molecules to the nearest neighbours,
    // the extremal sequences on trees.
    const auto& X = *D.free;
    Matrix mols(D.dim, D.dim);
    for (int c = 0; c < D.dim; ++c) {
      const std::size_t x = X.point_of_coord(c);
      std::size_t best = X.base();
      for (std::size_t y = 0; y < X.size(); ++y) {
        if (y == x) continue;
        if (X.coord(y) < c && X.distance(x, y) < X.distance(x, best)) best = y;
      }
      Vector m = Vector::Zero(D.dim);
      m(c) = 1.0;
      if (X.coord(best) >= 0) m(X.coord(best)) = -1.0;
      mols.col(c) = m / X.distance(x, best);
    }
    starts.push_back(mols);
    if (D.dim <= 8) starts.push_back(mols * sign_vectors(D.dim));
  } else if (D.dim <= 8) {
    starts.push_back(sign_vectors(D.dim));
  }
  return starts;
}

std::size_t weak_work(const Domain& D) {
  const std::size_t k = D.ball() ? D.ball()->count() : 64;
  return k * static_cast<std::size_t>(D.dim) * static_cast<std::size_t>(std::max(D.dim, 1));
}

struct NuclearRep {
  Matrix functionals;  // domain-dual coordinates, dim x N
  Matrix vectors;      // codomain coordinates, k x N
  double value = kInf;
};

NuclearRep nuclear(const Domain& D, const LinearOperator& u) {
  const Matrix& A = u.matrix();
  const Codomain& G = u.codomain();
  auto score = [&](const Matrix& F, const Matrix& Y) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < F.cols(); ++i) v += D.dual_norm(F.col(i)) * G.norm(Y.col(i));
    return v;
  };
  NuclearRep best;
  {
    const Matrix F = Matrix::Identity(D.dim, D.dim);
    best = {F, A, score(F, A)};
  }
  {
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix F = svd.matrixV();
    const Matrix Y = svd.matrixU() * svd.singularValues().asDiagonal();
    const double v = score(F, Y);
    if (v < best.value) best = {F, Y, v};
  }
  return best;
}

Json nuclear_cert(const NuclearRep& r) {
  return {{"type", "nuclear_rep"},
          {"functionals", json_columns(r.functionals)},
          {"vectors", json_columns(r.vectors)},
          {"value", r.value}};
}

pietsch::CuttingPlaneResult pi2_into_l2(const Domain& D, const Matrix& u, const SummingOptions& o) {
  Matrix cand = D.dual_vertices();
  if (!o.extra_functionals.empty()) cand = hcat(cand, stack(o.extra_functionals, D.dim));
  std::function<Vector(const Vector&)> grow;
  if (!D.ball() && !(D.normed && D.normed->dual_ball_is_polytope())) {
    grow = [&D](const Vector& x) { return D.norming_functional(x); };
    std::vector<Vector> seed;
    for (int j = 0; j < D.dim; ++j) seed.push_back(D.norming_functional(Vector::Unit(D.dim, j)));
    cand = hcat(cand, stack(seed, D.dim));
  }
  return pietsch::two_summing_cutting_plane(
      u, cand, {}, [&D](const Matrix& s) { return D.weak(s, Exponent::finite(2.0)); }, grow,
      o.cutting_plane);
}

NormEstimate pi2_euclidean(const Domain& D, const LinearOperator& u, const SummingOptions& o) {
  NormEstimate e;
  const Matrix& A = u.matrix();
  if (D.normed && D.normed->is_euclidean()) {
    // Hilbert-Schmidt norm, with the eigenbasis of u^T u as both witness
    // and Pietsch measure.
    Eigen::SelfAdjointEigenSolver<Matrix> es(A.transpose() * A);
    const Vector lam = es.eigenvalues().cwiseMax(0.0);
    const double hs = A.norm();
    pietsch::Certificate c{es.eigenvectors(), lam / std::max(lam.sum(), 1e-300), hs};
    e.lower = hs;
    e.upper = hs;
    e.lower_cert = sequence_cert(Matrix::Identity(D.dim, D.dim), Exponent::finite(2.0), hs);
    e.upper_cert = pietsch_cert(c);
    return e;
  }
  const auto r = pi2_into_l2(D, A, o);
  e.lower = r.lower;
  e.upper = r.upper;
  e.lower_cert = sequence_cert(r.witness, Exponent::finite(2.0), r.lower);
  e.upper_cert = pietsch_cert(r.certificate);
  return e;
}

NormEstimate pi_general(const Domain& D, const LinearOperator& u, Exponent p,
                        const SummingOptions& o) {
  const Matrix& A = u.matrix();
  const Codomain& G = u.codomain();
  NormEstimate e;

  std::vector<Matrix> starts = canonical_starts(D, A);
  e.upper = kInf;
  const NuclearRep nuc = nuclear(D, u);
  e.upper = nuc.value;
  e.upper_cert = nuclear_cert(nuc);
  if (p.is_infinite() || p.value() >= 2.0) {
    // pi_p <= pi_2 <= ||id : l_2 -> G|| pi_2(u : D -> l_2).
    const auto r = pi2_into_l2(D, A, o);
    const double c = euclidean_to(G);
    if (c * r.upper < e.upper) {
      e.upper = c * r.upper;
      Json inner = pietsch_cert(r.certificate);
      e.upper_cert = {{"type", "factor_bound"}, {"factor", c}, {"inner", inner}, {"value", e.upper}};
    }
    if (r.witness.cols() > 0) starts.push_back(r.witness);
  }

  SequenceProblem prob{[&](const Vector& x) { return G.norm(A * x); },
                       [&](const Matrix& s) { return D.weak(s, p); }, p, D.dim};
  const SequenceBest best = search_sequences(prob, starts, o, weak_work(D));
  e.lower = std::min(best.value, e.upper);
  e.lower_cert = sequence_cert(best.sequence, p, best.value);
  return e;
}

}  // namespace

double euclidean_to(const Codomain& G) {
  const int k = G.dim();
  if (G.is_free()) {
    const auto& X = *G.free();
    if (X.size() <= kMaxVertexPoints) return G.ball().vertices().colwise().norm().maxCoeff();
    // ||y||_AE <= sum |y_j| d(x_j, base) <= ||y||_2 ||d||_2.
    double s = 0.0;
    for (int c = 0; c < X.free_dim(); ++c) {
      const double d = X.distance(X.point_of_coord(c), X.base());
      s += d * d;
    }
    return std::sqrt(s);
  }
  const Exponent r = G.normed().exponent();
  const double inv = r.is_infinite() ? 0.0 : 1.0 / r.value();
  return std::max(1.0, std::pow(static_cast<double>(k), inv - 0.5));
}

double dual_to_euclidean(const Codomain& G) {
  if (G.is_free()) {
    // max ||z||_2 over Lip(z) <= 1 is attained at a vertex of the Lipschitz ball.
    if (G.free()->size() > kMaxVertexPoints) return kInf;
    return G.ball().vertices().colwise().norm().maxCoeff();
  }
  const Exponent r = G.normed().dual().exponent();
  const double inv = r.is_infinite() ? 0.0 : 1.0 / r.value();
  return std::max(1.0, std::pow(static_cast<double>(G.dim()), 0.5 - inv));
}

double adjoint_sequence_ratio(const LinearOperator& u, const Matrix& sequence, Exponent p) {
  if (sequence.rows() != u.codomain().dim()) throw InputError("sequence dimension mismatch");
  const Domain D = Domain::of(u);
  return Adjoint(u, D).ratio(sequence, p);
}

Matrix domain_extreme_points(const LinearOperator& u) {
  const Domain D = Domain::of(u);
  if (!D.has_extreme_points()) throw InputError("the domain ball has no enumerated extreme points");
  return D.extreme_points();
}

double domain_dual_norm(const LinearOperator& u, const Vector& f) {
  return Domain::of(u).dual_norm(f);
}

// ---------------------------------------------------------------- op norm

NormEstimate op_norm(const LinearOperator& u) {
  NormEstimate e;
  e.quantity = "op";
  const Matrix& A = u.matrix();
  const Codomain& G = u.codomain();
  if (A.isZero(0.0)) return NormEstimate::zero(e.quantity);
  const Domain D = Domain::of(u);

  auto best_point = [&](const Matrix& pts) {
    Eigen::Index arg = 0;
    double val = -1.0;
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      const double v = G.norm(A * pts.col(j));
      if (v > val) { val = v; arg = j; }
    }
    return std::pair{val, Vector(pts.col(arg))};
  };
  auto set_lower = [&](double v, const Vector& x) {
    e.lower = v;
    e.lower_cert = {{"type", "norming_vector"}, {"vector", json_vector(x)}, {"value", v}};
  };

  if (D.has_extreme_points()) {
    const auto [v, x] = best_point(D.extreme_points());
    set_lower(v, x);
    e.upper = v;
    e.upper_cert = {{"type", "extreme_point_max"}, {"value", v}};
    e.exact = true;
    return e;
  }
  const Exponent q = D.normed->exponent();
  if (q.is(2.0) && G.is_euclidean()) {
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinV);
    const double s = svd.singularValues()(0);
    set_lower(G.norm(A * svd.matrixV().col(0)), svd.matrixV().col(0));
    e.upper = s;
    e.upper_cert = {{"type", "spectral"}, {"value", s}};
    finish(e);
    return e;
  }
  if (!G.is_free() && G.normed().exponent().is_infinite()) {
    // Row-wise: ||u|| = max_i ||row_i||_{q*}.
    const FinNormedSpace dual = D.normed->dual();
    Eigen::Index arg = 0;
    double val = -1.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      const double v = dual.norm(A.row(i).transpose());
      if (v > val) { val = v; arg = i; }
    }
    const Vector x = D.normed->dual().norming_functional(A.row(arg).transpose());
    set_lower(G.norm(A * x) / std::max(D.norm(x), 1e-300), x);
    e.upper = val;
    e.upper_cert = {{"type", "row_norm_max"}, {"value", val}};
    finish(e);
    return e;
  }
  // General l_q domain: lower from singular and basis directions, upper
  // from ||u : l_1 -> G|| ||id : l_q -> l_1||.
  double lo = 0.0;
  Vector arg = Vector::Unit(D.dim, 0);
  Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinV);
  const Matrix cands = hcat(Matrix::Identity(D.dim, D.dim), svd.matrixV());
  for (Eigen::Index j = 0; j < cands.cols(); ++j) {
    const Vector x = cands.col(j);
    const double v = G.norm(A * x) / D.norm(x);
    if (v > lo) { lo = v; arg = x; }
  }
  set_lower(lo, arg);
  double col = 0.0;
  for (Eigen::Index j = 0; j < A.cols(); ++j) col = std::max(col, G.norm(A.col(j)));
  const double inv = q.is_infinite() ? 0.0 : 1.0 / q.value();
  e.upper = col * std::pow(static_cast<double>(D.dim), 1.0 - inv);
  e.upper_cert = {{"type", "column_bound"}, {"value", e.upper}};
  finish(e);
  return e;
}

// ------------------------------------------------------------ pi_p / SL

double sequence_ratio(const LinearOperator& u, const Matrix& sequence, Exponent p) {
  if (sequence.rows() != u.domain_dim()) throw InputError("sequence dimension mismatch");
  const Domain D = Domain::of(u);
  const Matrix& A = u.matrix();
  SequenceProblem prob{[&](const Vector& x) { return u.codomain().norm(A * x); },
                       [&](const Matrix& s) { return D.weak(s, p); }, p, D.dim};
  return prob.ratio(sequence);
}

NormEstimate pi_norm(const LinearOperator& u, Exponent p, const SummingOptions& o) {
  if (p.is_infinite()) throw InputError("p-summing norms need a finite p");
  const std::string quantity = "pi_" + p.to_string();
  if (u.matrix().isZero(0.0)) return NormEstimate::zero(quantity);
  const Domain D = Domain::of(u);
  NormEstimate e = (p.is(2.0) && u.codomain().is_euclidean()) ? pi2_euclidean(D, u, o)
                                                               : pi_general(D, u, p, o);
  e.quantity = quantity;
  finish(e);
  return e;
}

Matrix witness_sequence(const NormEstimate& e, Eigen::Index dim) {
  if (!e.lower_cert.is_object() || e.lower_cert.value("type", "") != "sequence_witness") {
    return Matrix(dim, 0);
  }
  return parse_columns(e.lower_cert.at("sequence"), dim);
}

PairingWitness sl_pairing_witness(const LipschitzMap& T, Exponent p, const Matrix& sequence,
                                  const TensorOptions& options) {
  if (T.codomain().is_free()) throw InputError("the pairing form needs a normed codomain");
  const FinNormedSpace& G = T.codomain().normed();
  const LinearOperator lin = linearize(T);
  const Matrix images = lin.matrix() * sequence;
  Matrix g(G.dim(), sequence.cols());
  for (Eigen::Index k = 0; k < sequence.cols(); ++k) {
    const double n = G.norm(images.col(k));
    g.col(k) = G.norming_functional(images.col(k)) * std::pow(n, p.value() - 1.0);
  }
  PairingWitness w{TensorElement::from_matrix(T.domain(), G.dual(), sequence * g.transpose()),
                   0.0, {}, 0.0};
  w.pairing = pair_with_map(T, w.tensor);
  w.dp = dp_norm_l(w.tensor, p, options);
  w.ratio = w.dp.upper > 0 ? w.pairing / w.dp.upper : 0.0;
  return w;
}

NormEstimate strictly_lip_p_summing_norm(const LipschitzMap& T, Exponent p,
                                         const SummingOptions& o) {
  const LinearOperator lin = linearize(T);
  NormEstimate e = pi_norm(lin, p, o);
  e.quantity = "PiSL_" + p.to_string();
  const bool pairing = !T.codomain().is_free() && !p.is(1.0) && !e.upper_cert.empty() &&
                       T.domain()->size() <= kMaxVertexPoints && e.upper > 0;
  if (!pairing) return e;

  const Matrix seq = witness_sequence(e, lin.domain_dim());
  if (seq.cols() > 0) {
    PairingWitness w = sl_pairing_witness(T, p, seq, o.tensor);
    if (w.ratio > e.lower && w.ratio <= e.upper) {
      e.lower = w.ratio;
      e.lower_cert = {{"type", "sl_pairing"},
                      {"tensor", tensor_json(w.tensor)},
                      {"pairing", w.pairing},
                      {"dp_rep", w.dp.upper_cert},
                      {"value", w.ratio}};
    }
  }
  // Random tensors must satisfy |<T, u>| <= upper * d_p(u).
  const FinNormedSpace factor = T.codomain().normed().dual();
  Rng rng = make_rng(o.seed, 77);
  double worst = 0.0;
  for (int s = 0; s < o.pairing_samples; ++s) {
    const Matrix M = gaussian_matrix(rng, lin.domain_dim(), factor.dim());
    const TensorElement u = TensorElement::from_matrix(T.domain(), factor, M);
    const NormEstimate dp = dp_norm_l(u, p, o.tensor);
    if (dp.upper > 0) worst = std::max(worst, std::abs(pair_with_map(T, u)) / dp.upper);
  }
  e.upper_cert["pairing_check"] = {{"samples", o.pairing_samples},
                                   {"max_ratio", worst},
                                   {"holds", worst <= e.upper * (1.0 + 1e-9) + 1e-12}};
  finish(e);
  return e;
}

// ------------------------------------------------------------------- Pi_p^L

NormEstimate lip_p_summing_norm(const LipschitzMap& T, Exponent p, const SummingOptions& o) {
  if (p.is_infinite()) throw InputError("Lipschitz p-summing norms need a finite p");
  const std::string quantity = "PiL_" + p.to_string();
  const auto& X = *T.domain();
  if (T.values().isZero(0.0)) return NormEstimate::zero(quantity);
  const double pv = p.value();
  const auto pairs = point_pairs(X);
  const Matrix K = molecule_matrix(X);
  const auto P = static_cast<Eigen::Index>(pairs.size());
  const LinearOperator lin = linearize(T);

  Vector ratio(P);  // ||T x - T y|| / d(x, y)
  for (Eigen::Index q = 0; q < P; ++q) {
    const auto [x, y] = pairs[static_cast<std::size_t>(q)];
    ratio(q) = T.codomain().norm(T.value(x) - T.value(y)) / X.distance(x, y);
  }

  NormEstimate e;
  e.quantity = quantity;
  if (X.size() > kMaxVertexPoints) {
    // Single molecules give Lip(T); the strictly summing bound is the upper side.
    Eigen::Index q = 0;
    e.lower = ratio.maxCoeff(&q);
    const auto [x, y] = pairs[static_cast<std::size_t>(q)];
    e.lower_cert = {{"type", "molecule_witness"},
                    {"p", pv},
                    {"pairs", Json::array({Json::array({X.name(x), X.name(y)})})},
                    {"scales", Json::array({1.0 / X.distance(x, y)})},
                    {"value", e.lower}};
    const NormEstimate sl = pi_norm(lin, p, o);
    e.upper = sl.upper;
    e.upper_cert = sl.upper_cert;
    finish(e);
    return e;
  }

  // Pietsch domination over Lip-ball vertices:
  //   min sum lambda  s.t.  sum_f lambda_f |f(m_q)/d_q|^p >= ratio_q^p.
  const LipBall ball(T.domain());
  const Matrix& V = ball.vertices();
  lp::LinearProgram prog;
  prog.cost = Vector::Ones(V.cols());
  prog.A.resize(P, V.cols());
  prog.rhs.resize(P);
  prog.sense.assign(static_cast<std::size_t>(P), lp::RowSense::GreaterEqual);
  for (Eigen::Index q = 0; q < P; ++q) {
    const auto [x, y] = pairs[static_cast<std::size_t>(q)];
    const double d = X.distance(x, y);
    for (Eigen::Index f = 0; f < V.cols(); ++f) {
      prog.A(q, f) = std::pow(std::abs(V.col(f).dot(K.col(q))) / d, pv);
    }
    prog.rhs(q) = std::pow(ratio(q), pv);
  }
  const lp::Solution sol = lp::solve(prog);
  if (sol.status != lp::Status::Optimal) {
    throw InternalError(std::string("Pietsch LP failed: ") + lp::to_string(sol.status));
  }

  // Upper: normalized weights; the constant is raised until every pair is
  // dominated, so the certificate holds exactly rather than to LP tolerance.
  std::vector<Eigen::Index> support;
  for (Eigen::Index f = 0; f < V.cols(); ++f) {
    if (sol.x(f) > 0) support.push_back(f);
  }
  const double total = sol.x.sum();
  Matrix F(V.rows(), static_cast<Eigen::Index>(support.size()));
  Vector w(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    F.col(static_cast<Eigen::Index>(i)) = V.col(support[i]);
    w(static_cast<Eigen::Index>(i)) = sol.x(support[i]) / total;
  }
  double cp = total;
  for (Eigen::Index q = 0; q < P; ++q) {
    double dom = 0.0;
    for (Eigen::Index i = 0; i < F.cols(); ++i) dom += w(i) * prog.A(q, support[static_cast<std::size_t>(i)]);
    if (prog.rhs(q) > 0) cp = std::max(cp, dom > 0 ? prog.rhs(q) / dom : kInf);
  }
  e.upper = std::pow(cp, 1.0 / pv);
  e.upper_cert = {{"type", "lip_pietsch"},
                  {"p", pv},
                  {"functionals", json_columns(F)},
                  {"weights", json_vector(w)},
                  {"constant", e.upper},
                  {"value", e.upper}};

  // Lower: the LP dual is a family of scaled molecules.
  Json names = Json::array();
  Json scales = Json::array();
  std::vector<Eigen::Index> used;
  for (Eigen::Index q = 0; q < P; ++q) {
    if (sol.y(q) > 0) used.push_back(q);
  }
  if (used.empty()) {
    Eigen::Index q = 0;
    ratio.maxCoeff(&q);
    used.push_back(q);
  }
  Matrix seq(K.rows(), static_cast<Eigen::Index>(used.size()));
  Vector sc(static_cast<Eigen::Index>(used.size()));
  for (std::size_t i = 0; i < used.size(); ++i) {
    const Eigen::Index q = used[i];
    const auto [x, y] = pairs[static_cast<std::size_t>(q)];
    const double s = std::pow(std::max(sol.y(q), 0.0), 1.0 / pv) / X.distance(x, y);
    sc(static_cast<Eigen::Index>(i)) = used.size() == 1 && sol.y(q) <= 0 ? 1.0 / X.distance(x, y) : s;
    seq.col(static_cast<Eigen::Index>(i)) = sc(static_cast<Eigen::Index>(i)) * K.col(q);
    names.push_back({X.name(x), X.name(y)});
    scales.push_back(sc(static_cast<Eigen::Index>(i)));
  }
  Vector img(seq.cols());
  for (Eigen::Index i = 0; i < seq.cols(); ++i) img(i) = T.codomain().norm(lin.matrix() * seq.col(i));
  const double weak = ball.weak_norm_value(seq, p);
  e.lower = weak > 0 ? std::min(lp_norm(img, p) / weak, e.upper) : 0.0;
  e.lower_cert = {{"type", "molecule_witness"}, {"p", pv}, {"pairs", names}, {"scales", scales},
                  {"value", e.lower}};
  finish(e);
  (void)o;
  return e;
}

// -------------------------------------------------------------------- D_p

NormEstimate strongly_p_summing_norm(const LinearOperator& u, Exponent p, const SummingOptions& o) {
  if (p.is_infinite() || p.is(1.0)) throw InputError("strongly p-summing norms need 1 < p < inf");
  const std::string quantity = "D_" + p.to_string();
  const Matrix& A = u.matrix();
  if (A.isZero(0.0)) return NormEstimate::zero(quantity);
  const Domain D = Domain::of(u);
  const Codomain& G = u.codomain();
  const int k = G.dim();

  NormEstimate e;
  e.quantity = quantity;
  const Adjoint adj(u, D);
  const bool polyhedral = adj.polyhedral;
  const Matrix& a = adj.images;
  auto adjoint_norm = [&adj](const Vector& z) { return adj.norm(z); };
  auto weak_dual = [&adj](const Matrix& z, Exponent q) { return adj.weak(z, q); };

  std::vector<Matrix> starts;
  starts.push_back(Matrix::Identity(k, k));
  if (G.is_euclidean() && polyhedral && p.is(2.0)) {
    // Exact tier: the design problem on the images of the extreme points.
    const pietsch::DesignResult d = pietsch::solve_design(a);
    Matrix Z(k, a.cols());
    Eigen::Index n = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (d.weights(j) > 1e-15) Z.col(n++) = std::sqrt(d.weights(j)) * d.inv_sqrt_a * a.col(j);
    }
    starts.push_back(Z.leftCols(n));
    e.upper = d.dual_bound;
    e.upper_cert = {{"type", "hilbert_density"},
                    {"density", json_rows(d.density)},
                    {"value", d.dual_bound}};
  } else {
    const NuclearRep nuc = nuclear(D, u);
    e.upper = nuc.value;
    e.upper_cert = nuclear_cert(nuc);
    if (polyhedral && p.value() >= 2.0) {
      // pi_2(u*) <= ||id : G* -> l_2|| pi_2(u* on l_2).
      const pietsch::DesignResult d = pietsch::solve_design(a);
      const double c = dual_to_euclidean(G);
      if (c * d.dual_bound < e.upper) {
        e.upper = c * d.dual_bound;
        e.upper_cert = {{"type", "factor_bound"},
                        {"factor", c},
                        {"inner", {{"type", "hilbert_density"},
                                   {"density", json_rows(d.density)},
                                   {"value", d.dual_bound}}},
                        {"value", e.upper}};
      }
    }
  }

  SequenceProblem prob{adjoint_norm, [&](const Matrix& z) { return weak_dual(z, p); }, p, k};
  const std::size_t work = static_cast<std::size_t>(std::max<Eigen::Index>(a.cols(), 16)) *
                           static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
  const SequenceBest best = search_sequences(prob, starts, o, work);
  e.lower = std::min(best.value, e.upper);
  e.lower_cert = {{"type", "adjoint_sequence"},
                  {"p", p.value()},
                  {"sequence", json_columns(best.sequence)},
                  {"value", best.value}};
  finish(e);
  return e;
}

NormEstimate lip_cohen_strongly_p_summing_norm(const LipschitzMap& T, Exponent p,
                                               const SummingOptions& o) {
  NormEstimate e = strongly_p_summing_norm(linearize(T), p, o);
  e.quantity = "DL_" + p.to_string();
  return e;
}

}  // namespace lipnorm
