// Certified estimators for the cross-norms on F(X) (x) E, working on the
// canonical matrix M ((|X|-1) x dim E).
//
// Exact or convergent dual certificates exist when E is Euclidean and p = 2:
//   d_2:  max over probability nu on Lip-ball vertices of tr((M^T D_nu M)^(1/2)),
//   g_2:  max over S >= 0, |S|_F = 1 and Lip-1 maps W into l_2 of <W, M S>,
//   cs_2: max over Pietsch weights lambda of a transport with costs
//         c_p = (sum_f lambda_f (f(x) - f(y))^2)^(1/2).
// Every other lower bound falls back to the injective norm. Upper bounds are
// always explicit representations evaluated exactly.

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lipnorm/error.hpp"
#include "lipnorm/json_io.hpp"
#include "lipnorm/lp.hpp"
#include "lipnorm/pietsch.hpp"
#include "lipnorm/tensor.hpp"
#include "lipnorm/transport.hpp"

namespace lipnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Context {
  SpaceRef space;
  FinNormedSpace E;
  Matrix M;
  Exponent p;
  TensorOptions options;
  std::shared_ptr<const LipBall> ball;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  Matrix K;       // molecule matrix (|X|-1) x P
  Vector dist;    // P
  const PointedMetricSpace& X() const { return *space; }
  bool hilbert() const { return E.is_euclidean() && p.is(2.0); }
};

struct Rep {
  Matrix left;   // (|X|-1) x N
  Matrix right;  // dim E x N
  double value = kInf;
};

struct MolRep {
  Matrix vectors;       // dim E x P, one column per pair
  Vector multiplicity;  // P
  double value = kInf;
};

Json pair_list(const Context& c, const std::vector<Eigen::Index>& used) {
  Json a = Json::array();
  for (auto i : used) {
    const auto [x, y] = c.pairs[static_cast<std::size_t>(i)];
    a.push_back({c.X().name(x), c.X().name(y)});
  }
  return a;
}

void finish(NormEstimate& e) {
  e.exact = e.upper - e.lower <= kExactTol * std::max(1.0, e.upper);
  e.loose = !e.exact && e.relative_width() > kSearchRelWidth;
}

// ---------------------------------------------------------------- injective

struct InjectiveResult {
  double value = 0.0;
  Vector functional;  // free coordinates
  Vector dual;        // in E*
};

InjectiveResult injective_exact(const Context& c) {
  InjectiveResult r;
  const Matrix& V = c.ball->vertices();
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    const Vector w = c.M.transpose() * V.col(j);
    const double n = c.E.norm(w);
    if (n > r.value) {
      r.value = n;
      r.functional = V.col(j);
      r.dual = c.E.norming_functional(w);
    }
  }
  return r;
}

// Alternating ascent for spaces beyond the vertex cap.
InjectiveResult injective_search(const Context& c) {
  InjectiveResult best;
  for (int r = 0; r < std::max(4, c.options.dual_restarts); ++r) {
    Rng rng = make_rng(c.options.seed, 1000 + static_cast<unsigned long long>(r));
    Vector dual = c.E.norming_functional(gaussian_vector(rng, c.E.dim()));
    double prev = -1.0;
    for (int it = 0; it < 50; ++it) {
      const KrDualResult kr = ae_dual_norm(FreeVector(c.space, c.M * dual));
      const Vector f = kr.maximizer.coords();
      const Vector w = c.M.transpose() * f;
      const double v = c.E.norm(w);
      if (v > best.value) best = {v, f, c.E.norming_functional(w)};
      if (v <= prev * (1.0 + 1e-12)) break;
      prev = v;
      dual = c.E.norming_functional(w);
    }
  }
  return best;
}

Json injective_cert(const InjectiveResult& r) {
  return {{"type", "injective_pairing"},
          {"functional", json_vector(r.functional)},
          {"dual", json_vector(r.dual)},
          {"value", r.value}};
}

// --------------------------------------------------------------- projective

struct ProjectiveResult {
  TransportResult transport;
  Rep rep;  // flow representation with molecule left factors
  std::vector<Eigen::Index> used;
};

ProjectiveResult projective(const Context& c) {
  ProjectiveResult r;
  r.transport = vector_transport(c.X(), c.M, c.E);
  const Matrix& flow = r.transport.flow;
  const double scale = std::max(flow.cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index q = 0; q < flow.rows(); ++q) {
    if (flow.row(q).cwiseAbs().maxCoeff() > 1e-15 * scale) r.used.push_back(q);
  }
  const auto n = static_cast<Eigen::Index>(r.used.size());
  r.rep.left.resize(c.M.rows(), n);
  r.rep.right.resize(c.E.dim(), n);
  double v = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto q = r.used[static_cast<std::size_t>(i)];
    r.rep.left.col(i) = c.K.col(q);
    r.rep.right.col(i) = flow.row(q).transpose();
    v += c.dist(q) * c.E.norm(flow.row(q).transpose());
  }
  r.rep.value = v;
  return r;
}

Json lip_map_cert(const Matrix& potential, double value) {
  return {{"type", "lip_map_pairing"}, {"map", json_rows(potential)}, {"value", value}};
}

Json rep_cert(const char* kind, Exponent p, const Rep& rep) {
  return {{"type", "tensor_rep"},
          {"kind", kind},
          {"p", p.is_infinite() ? Json("inf") : Json(p.value())},
          {"left", json_columns(rep.left)},
          {"right", json_columns(rep.right)},
          {"value", rep.value}};
}

// ------------------------------------------------------ representation search

double evaluate(const Context& c, CrossNorm kind, const Matrix& L, const Matrix& R) {
  return rep_value(kind, *c.ball, c.E, L, R, c.p);
}

// Left-factor exponent weight alpha: the closed-form per-term scaling
// |L_i| = w_i^alpha, |R_i| = w_i^(1 - alpha), w_i = |L_i||R_i|, bounds every
// objective by the projective value of the representation.
double balance_alpha(CrossNorm kind, Exponent p) {
  const Exponent q = p.conjugate();
  switch (kind) {
    case CrossNorm::Dp:
      return p.is_infinite() ? 0.0 : 1.0 / p.value();
    default:
      return q.is_infinite() ? 0.0 : 1.0 / q.value();
  }
}

Rep balanced(const Context& c, CrossNorm kind, Rep r) {
  const double alpha = balance_alpha(kind, c.p);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < r.left.cols(); ++i) {
    const double a = c.ball->support(r.left.col(i)), b = c.E.norm(r.right.col(i));
    if (a > 0.0 && b > 0.0) {
      const double w = a * b;
      r.left.col(i) *= std::pow(w, alpha) / a;
      r.right.col(i) *= std::pow(w, 1.0 - alpha) / b;
      keep.push_back(i);
    }
  }
  Rep out;
  out.left.resize(r.left.rows(), static_cast<Eigen::Index>(keep.size()));
  out.right.resize(r.right.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.left.col(static_cast<Eigen::Index>(i)) = r.left.col(keep[i]);
    out.right.col(static_cast<Eigen::Index>(i)) = r.right.col(keep[i]);
  }
  out.value = evaluate(c, kind, out.left, out.right);
  return out;
}

// Local polish of per-term scales.
Rep polish_scales(const Context& c, CrossNorm kind, const Rep& r, int evals) {
  const Eigen::Index n = r.left.cols();
  if (n <= 1) return r;
  auto build = [&](const Vector& t, Matrix& L, Matrix& R) {
    L = r.left * t.array().exp().matrix().asDiagonal();
    R = r.right * (-t.array()).exp().matrix().asDiagonal();
  };
  auto f = [&](const Vector& t) {
    Matrix L, R;
    build(t, L, R);
    return evaluate(c, kind, L, R);
  };
  NelderMeadOptions o;
  o.max_evaluations = evals;
  const auto res = nelder_mead(f, Vector::Zero(n), o);
  if (!(res.value < r.value)) return r;
  Rep out;
  build(res.x, out.left, out.right);
  out.value = evaluate(c, kind, out.left, out.right);
  return out.value < r.value ? out : r;
}

// Representations M = [U S^(1/2), Z] G (V S^(1/2), 0]^T G^-1)^T with inner
// dimension rank + 2, searched from seeded random starts.
Rep mixing_search(const Context& c, CrossNorm kind, int restart) {
  Eigen::JacobiSVD<Matrix> svd(c.M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > 1e-12 * sv(0)) ++r;
  const Eigen::Index rows = c.M.rows();
  const Eigen::Index n = r + 2;
  const Matrix uh = svd.matrixU().leftCols(r) * sv.head(r).cwiseSqrt().asDiagonal();
  const Matrix vh = svd.matrixV().leftCols(r) * sv.head(r).cwiseSqrt().asDiagonal();
  auto build = [&](const Vector& th, Matrix& L, Matrix& R) {
    Matrix base_l(rows, n), base_r = Matrix::Zero(c.E.dim(), n);
    base_l.leftCols(r) = uh;
    base_l.rightCols(2) = Eigen::Map<const Matrix>(th.data(), rows, 2);
    base_r.leftCols(r) = vh;
    const Matrix G = Eigen::Map<const Matrix>(th.data() + rows * 2, n, n);
    const Eigen::FullPivLU<Matrix> lu(G);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-10) return false;
    L = base_l * G;
    R = base_r * lu.inverse().transpose();
    return true;
  };
  Rng rng = make_rng(c.options.seed, static_cast<unsigned long long>(restart));
  Vector th(rows * 2 + n * n);
  th.head(rows * 2) = 0.5 * gaussian_vector(rng, rows * 2) * std::sqrt(sv(0));
  Eigen::Map<Matrix>(th.data() + rows * 2, n, n) =
      Matrix::Identity(n, n) + 0.5 * gaussian_matrix(rng, n, n);
  auto f = [&](const Vector& t) {
    Matrix L, R;
    if (!build(t, L, R)) return kInf;
    return evaluate(c, kind, L, R);
  };
  NelderMeadOptions o;
  o.max_evaluations = 1500;
  o.initial_step = 0.3;
  auto res = nelder_mead(f, th, o);
  res = nelder_mead(f, res.x, o);  // restart from the best vertex
  Rep out;
  if (!build(res.x, out.left, out.right)) return out;
  out.value = evaluate(c, kind, out.left, out.right);
  return out;
}

std::vector<Rep> basic_candidates(const Context& c, const ProjectiveResult& proj) {
  std::vector<Rep> out;
  {
    Eigen::JacobiSVD<Matrix> svd(c.M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::Index r = 0;
    while (r < svd.singularValues().size() &&
           svd.singularValues()(r) > 1e-12 * svd.singularValues()(0)) {
      ++r;
    }
    Rep s;
    s.left = svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal();
    s.right = svd.matrixV().leftCols(r);
    out.push_back(std::move(s));
  }
  out.push_back({Matrix::Identity(c.M.rows(), c.M.rows()), c.M.transpose(), kInf});
  out.push_back(proj.rep);
  return out;
}

// Uppers for d_p / g_p: candidates, scale polish, then seeded mixing search
// unless the bracket is already closed.
Rep search_general(const Context& c, CrossNorm kind, std::vector<Rep> candidates, double lower) {
  Rep best;
  for (auto& cand : candidates) {
    if (cand.left.cols() == 0) continue;
    Rep b = balanced(c, kind, std::move(cand));
    if (b.left.cols() <= 16) b = polish_scales(c, kind, b, 400 * static_cast<int>(b.left.cols()));
    if (b.value < best.value) best = std::move(b);
  }
  auto closed = [&] { return best.value - lower <= 1e-10 * std::max(1.0, best.value); };
  if (closed()) return best;
  const int restarts = c.options.restarts;
  std::vector<Rep> found(static_cast<std::size_t>(restarts));
  parallel_for(restarts, c.options.threads,
               [&](int r) { found[static_cast<std::size_t>(r)] = mixing_search(c, kind, r); });
  for (auto& r : found) {
    if (r.value < best.value) best = std::move(r);
  }
  return best;
}

// ------------------------------------------------------- molecule-only search

MolRep mol_evaluate(const Context& c, CrossNorm kind, const Matrix& vectors, const Vector& mult) {
  MoleculeRep rep;
  std::vector<Eigen::Index> used;
  for (Eigen::Index q = 0; q < vectors.cols(); ++q) {
    if (vectors.col(q).cwiseAbs().maxCoeff() > 0.0) used.push_back(q);
  }
  rep.multiplicity.resize(static_cast<Eigen::Index>(used.size()));
  rep.vectors.resize(vectors.rows(), static_cast<Eigen::Index>(used.size()));
  for (std::size_t i = 0; i < used.size(); ++i) {
    rep.pairs.push_back(c.pairs[static_cast<std::size_t>(used[i])]);
    rep.multiplicity(static_cast<Eigen::Index>(i)) = mult(used[i]);
    rep.vectors.col(static_cast<Eigen::Index>(i)) = vectors.col(used[i]);
  }
  MolRep out{vectors, mult, kInf};
  // exp of a very negative log-multiplicity underflows; such points are off the domain.
  for (Eigen::Index i = 0; i < rep.multiplicity.size(); ++i) {
    if (!(rep.multiplicity(i) > 0.0) || !std::isfinite(rep.multiplicity(i))) return out;
  }
  if (used.empty()) {
    out.value = 0.0;
    return out;
  }
  out.value = molecule_rep_value(kind, *c.ball, c.E, rep, c.p);
  return out;
}

// Multiplicities from the balanced scaling of each term delta_q [x] E_q.
Vector balanced_multiplicity(const Context& c, CrossNorm kind, const Matrix& vectors) {
  const double alpha = balance_alpha(kind, c.p);
  const Exponent q = c.p.conjugate();
  Vector s(vectors.cols());
  for (Eigen::Index i = 0; i < vectors.cols(); ++i) {
    const double w = c.dist(i) * c.E.norm(vectors.col(i));
    if (w == 0.0 || q.is_infinite()) {
      s(i) = 1.0;
      continue;
    }
    // left norm c_i d_i = w^alpha with c_i = s_i^(1/q).
    s(i) = std::pow(std::pow(w, alpha) / c.dist(i), q.value());
  }
  return s;
}

MolRep search_molecules(const Context& c, CrossNorm kind, const std::vector<Matrix>& starts,
                        double lower) {
  const auto np = static_cast<Eigen::Index>(c.pairs.size());
  const Eigen::Index k = c.E.dim();
  Eigen::JacobiSVD<Matrix> svd(c.K, Eigen::ComputeFullV);
  Eigen::Index rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()(rank) > 1e-10) ++rank;
  const Matrix null = svd.matrixV().rightCols(np - rank);  // P x m
  const Eigen::Index m = null.cols();

  // Parameters: z (m x k) then log multiplicities (P).
  auto local = [&](const Matrix& e0, const Vector& s0, int evals) {
    auto unpack = [&](const Vector& th, Matrix& vec, Vector& s) {
      const Matrix z = Eigen::Map<const Matrix>(th.data(), m, k);
      vec = (e0 + null * z).transpose();
      s = th.tail(np).array().exp();
    };
    auto f = [&](const Vector& th) {
      Matrix vec;
      Vector s;
      unpack(th, vec, s);
      return mol_evaluate(c, kind, vec, s).value;
    };
    Vector th = Vector::Zero(m * k + np);
    th.tail(np) = s0.array().max(1e-300).log();
    NelderMeadOptions o;
    o.max_evaluations = evals;
    auto res = nelder_mead(f, th, o);
    res = nelder_mead(f, res.x, o);
    Matrix vec;
    Vector s;
    unpack(res.x, vec, s);
    return mol_evaluate(c, kind, vec, s);
  };

  MolRep best;
  for (const auto& e0 : starts) {  // e0: P x k
    const Vector s0 = balanced_multiplicity(c, kind, e0.transpose());
    MolRep r = mol_evaluate(c, kind, e0.transpose(), s0);
    if (r.value < best.value) best = r;
    r = local(e0, s0, 300 * static_cast<int>(m * k + np));
    if (r.value < best.value) best = r;
  }
  if (best.value - lower <= 1e-10 * std::max(1.0, best.value)) return best;

  const Matrix e_base = starts.empty() ? Matrix(c.K.transpose() * (c.K * c.K.transpose()).ldlt().solve(c.M))
                                       : starts.front();
  const double scale = std::max(e_base.cwiseAbs().maxCoeff(), 1e-300);
  const int restarts = c.options.restarts;
  std::vector<MolRep> found(static_cast<std::size_t>(restarts));
  parallel_for(restarts, c.options.threads, [&](int r) {
    Rng rng = make_rng(c.options.seed, 5000 + static_cast<unsigned long long>(r));
    const Matrix e0 = e_base + null * (0.5 * scale * gaussian_matrix(rng, m, k));
    Vector s0 = balanced_multiplicity(c, kind, e0.transpose());
    for (Eigen::Index i = 0; i < np; ++i) {
      s0(i) *= std::exp(0.5 * gaussian_vector(rng, 1)(0));
      if (!(s0(i) > 0.0)) s0(i) = 1.0;
    }
    found[static_cast<std::size_t>(r)] = local(e0, s0, 150 * static_cast<int>(m * k + np));
  });
  for (auto& r : found) {
    if (r.value < best.value) best = std::move(r);
  }
  return best;
}

Json mol_cert(const Context& c, CrossNorm kind, const MolRep& r) {
  std::vector<Eigen::Index> used;
  for (Eigen::Index q = 0; q < r.vectors.cols(); ++q) {
    if (r.vectors.col(q).cwiseAbs().maxCoeff() > 0.0) used.push_back(q);
  }
  Matrix vec(r.vectors.rows(), static_cast<Eigen::Index>(used.size()));
  Vector mult(static_cast<Eigen::Index>(used.size()));
  for (std::size_t i = 0; i < used.size(); ++i) {
    vec.col(static_cast<Eigen::Index>(i)) = r.vectors.col(used[i]);
    mult(static_cast<Eigen::Index>(i)) = r.multiplicity(used[i]);
  }
  return {{"type", "molecule_rep"},
          {"kind", to_string(kind)},
          {"p", c.p.is_infinite() ? Json("inf") : Json(c.p.value())},
          {"pairs", pair_list(c, used)},
          {"multiplicity", json_vector(mult)},
          {"vectors", json_columns(vec)},
          {"value", r.value}};
}

// ----------------------------------------------------------------------- d_2

struct DesignLower {
  double value = 0.0;
  Matrix functionals;
  Vector weights;
  Rep factorization;
};

DesignLower d2_design(const Context& c) {
  const Matrix& V = c.ball->vertices();
  const pietsch::DesignResult d = pietsch::solve_design(c.M.transpose() * V);
  DesignLower out;
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    if (d.weights(j) > 1e-15) support.push_back(j);
  }
  out.functionals.resize(V.rows(), static_cast<Eigen::Index>(support.size()));
  out.weights.resize(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    out.functionals.col(static_cast<Eigen::Index>(i)) = V.col(support[i]);
    out.weights(static_cast<Eigen::Index>(i)) = d.weights(support[i]);
  }
  out.weights /= out.weights.sum();
  const Matrix D = out.functionals * out.weights.asDiagonal() * out.functionals.transpose();
  Matrix root, inv;
  pietsch::psd_sqrt(c.M.transpose() * D * c.M, root, inv);
  out.value = root.trace();

  // Factorization from the optimality conditions: P = M A^(-1/2) M^T,
  // left = P^(1/2), right^T = P^(+1/2) M.
  const Matrix P = c.M * inv * c.M.transpose();
  Matrix proot, pinv;
  pietsch::psd_sqrt(P, proot, pinv);
  Rep f{proot, (pinv * c.M).transpose(), kInf};
  if ((f.left * f.right.transpose() - c.M).norm() <= 1e-10 * std::max(1.0, c.M.norm())) {
    out.factorization = std::move(f);
  }
  return out;
}

// ------------------------------------------------------------------ g_2 / mu_2

struct HilbertLower {
  double value = 0.0;
  Matrix potential;  // (|X|-1) x k, Lip-1 into l_2
  Matrix density;    // k x k, PSD, Frobenius norm 1
};

HilbertLower g2_dual(const Context& c) {
  const Eigen::Index k = c.E.dim();
  TransportOptions topt;
  topt.max_iterations = 20000;
  topt.rel_gap = 1e-9;
  auto run = [&](int r) {
    Matrix S;
    if (r == 0) {
      S = Matrix::Identity(k, k) / std::sqrt(static_cast<double>(k));
    } else if (r == 1 && c.ball) {
      const Vector e = injective_exact(c).dual;
      S = e.norm() > 0 ? Matrix(e * e.transpose() / e.squaredNorm()) : Matrix::Identity(k, k);
    } else {
      Rng rng = make_rng(c.options.seed, 9000 + static_cast<unsigned long long>(r));
      const Matrix G = gaussian_matrix(rng, k, k);
      S = G * G.transpose();
      S /= S.norm();
    }
    HilbertLower local;
    double prev = -1.0;
    for (int it = 0; it < 60; ++it) {
      const TransportResult t = vector_transport(c.X(), c.M * S, c.E, std::nullopt, topt);
      const Matrix G = t.potential.transpose() * c.M;
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (G + G.transpose()));
      const Vector lam = es.eigenvalues().cwiseMax(0.0);
      const double nrm = lam.norm();
      if (nrm == 0.0) break;
      const Matrix Sn = es.eigenvectors() * (lam / nrm).asDiagonal() * es.eigenvectors().transpose();
      const double val = (t.potential.cwiseProduct(c.M * Sn)).sum();
      if (val > local.value) local = {val, t.potential, Sn};
      if (val <= prev * (1.0 + 1e-10)) break;
      prev = val;
      S = Sn;
    }
    return local;
  };
  std::vector<HilbertLower> all(static_cast<std::size_t>(c.options.dual_restarts));
  parallel_for(c.options.dual_restarts, c.options.threads,
               [&](int r) { all[static_cast<std::size_t>(r)] = run(r); });
  HilbertLower best;
  for (auto& h : all) {
    if (h.value > best.value) best = std::move(h);
  }
  return best;
}

// Primal representation recovered from the g_2 dual optimum (Y, S, tau):
// mass only on pairs where Y is tight, E_q = (s_q / tau) S^+ (Y^T m_q).
std::vector<Matrix> mu2_recovery(const Context& c, const HilbertLower& h) {
  std::vector<Matrix> out;
  if (h.value <= 0.0) return out;
  const auto np = static_cast<Eigen::Index>(c.pairs.size());
  const Eigen::Index k = c.E.dim();
  const Matrix W = c.K.transpose() * h.potential;  // P x k, rows Y^T m_q
  Matrix root, inv;
  pietsch::psd_sqrt(h.density * h.density, root, inv);  // inv = S^+
  const Matrix target = h.value * c.M * h.density;       // (|X|-1) x k
  for (double tol : {1e-6, 1e-4, 1e-2}) {
    std::vector<Eigen::Index> tight;
    for (Eigen::Index q = 0; q < np; ++q) {
      if (W.row(q).norm() >= (1.0 - tol) * c.dist(q)) tight.push_back(q);
    }
    if (tight.empty()) continue;
    // min |A s - b|_1 over s >= 0, A's columns vec(m_q w_q^T).
    const auto nt = static_cast<Eigen::Index>(tight.size());
    const Eigen::Index rows = target.size();
    lp::LinearProgram prog;
    prog.A = Matrix::Zero(rows, nt + 2 * rows);
    prog.cost = Vector::Zero(nt + 2 * rows);
    prog.cost.tail(2 * rows).setOnes();
    for (Eigen::Index i = 0; i < nt; ++i) {
      const Matrix outer = c.K.col(tight[static_cast<std::size_t>(i)]) *
                           W.row(tight[static_cast<std::size_t>(i)]);
      prog.A.col(i) = Eigen::Map<const Vector>(outer.data(), rows);
    }
    prog.A.block(0, nt, rows, rows) = Matrix::Identity(rows, rows);
    prog.A.block(0, nt + rows, rows, rows) = -Matrix::Identity(rows, rows);
    prog.rhs = Eigen::Map<const Vector>(target.data(), rows);
    prog.sense.assign(static_cast<std::size_t>(rows), lp::RowSense::Equal);
    const lp::Solution sol = lp::solve(prog);
    if (sol.status != lp::Status::Optimal) continue;
    Matrix E = Matrix::Zero(np, k);
    for (Eigen::Index i = 0; i < nt; ++i) {
      const auto q = tight[static_cast<std::size_t>(i)];
      E.row(q) = (sol.x(i) / h.value) * (inv * W.row(q).transpose()).transpose();
    }
    // Exact feasibility: least-norm correction of the residual.
    E += c.K.transpose() * (c.K * c.K.transpose()).ldlt().solve(c.M - c.K * E);
    out.push_back(std::move(E));
  }
  return out;
}

// ----------------------------------------------------------------------- cs_2

struct CsLower {
  double value = 0.0;
  Matrix potential;
  Matrix functionals;
  Vector weights;
  Matrix flow;   // P x k, optimal for the final costs
  Vector costs;  // P
};

CsLower cs2_dual(const Context& c) {
  const Matrix& V = c.ball->vertices();
  const Eigen::Index nv = V.cols();
  const Matrix Q = (c.K.transpose() * V).array().square().matrix();  // P x nv
  Vector lam = Vector::Constant(nv, 1.0 / static_cast<double>(nv));
  CsLower best;
  TransportOptions topt;
  topt.max_iterations = 20000;
  topt.rel_gap = 1e-9;
  for (int it = 0; it < 120; ++it) {
    const Vector costs = (Q * lam).cwiseSqrt();
    const TransportResult t = vector_transport(c.X(), c.M, c.E, costs, topt);
    if (t.lower > best.value) {
      best.value = t.lower;
      best.potential = t.potential;
      best.weights = lam;
      best.flow = t.flow;
      best.costs = costs;
    }
    Vector grad = Vector::Zero(nv);
    for (Eigen::Index q = 0; q < Q.rows(); ++q) {
      if (costs(q) > 0.0) grad += (t.flow.row(q).norm() / (2.0 * costs(q))) * Q.row(q).transpose();
    }
    Eigen::Index j = 0;
    grad.maxCoeff(&j);
    const double gamma = 2.0 / (it + 3.0);
    lam *= 1.0 - gamma;
    lam(j) += gamma;
  }
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < nv; ++j) {
    if (best.weights(j) > 1e-15) support.push_back(j);
  }
  Matrix F(V.rows(), static_cast<Eigen::Index>(support.size()));
  Vector w(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) {
    F.col(static_cast<Eigen::Index>(i)) = V.col(support[i]);
    w(static_cast<Eigen::Index>(i)) = best.weights(support[i]);
  }
  best.functionals = F;
  best.weights = w;
  return best;
}

// ------------------------------------------------------------------ dispatch

void require_open_exponent(Exponent p) {
  if (p.is_infinite() || p.value() <= 1.0) {
    throw InputError("this cross-norm needs an exponent p in (1, inf), got " + p.to_string());
  }
}

NormEstimate injective_estimate(const Context& c) {
  NormEstimate e;
  e.quantity = "epsL";
  if (c.ball) {
    const InjectiveResult r = injective_exact(c);
    e.lower = e.upper = r.value;
    e.lower_cert = injective_cert(r);
    e.upper_cert = {{"type", "vertex_enumeration"}, {"value", r.value}};
    e.exact = true;
    return e;
  }
  const InjectiveResult r = injective_search(c);
  e.lower = r.value;
  e.lower_cert = injective_cert(r);
  const ProjectiveResult proj = projective(c);
  e.upper = proj.rep.value;
  e.upper_cert = rep_cert("piL", c.p, proj.rep);
  finish(e);
  return e;
}

NormEstimate projective_estimate(const Context& c) {
  NormEstimate e;
  e.quantity = "piL";
  const ProjectiveResult proj = projective(c);
  e.lower = proj.transport.lower;
  e.lower_cert = lip_map_cert(proj.transport.potential, proj.transport.lower);
  if (c.ball) {
    const InjectiveResult r = injective_exact(c);
    if (r.value > e.lower) {
      e.lower = r.value;
      e.lower_cert = injective_cert(r);
    }
  }
  e.upper = proj.rep.value;
  e.upper_cert = rep_cert("piL", c.p, proj.rep);
  finish(e);
  return e;
}

NormEstimate chevet_estimate(const Context& c, CrossNorm kind) {
  NormEstimate e;
  e.quantity = to_string(kind);
  const InjectiveResult inj = injective_exact(c);
  e.lower = inj.value;
  e.lower_cert = injective_cert(inj);
  const ProjectiveResult proj = projective(c);
  std::vector<Rep> candidates = basic_candidates(c, proj);

  if (c.hilbert() && kind == CrossNorm::Dp) {
    DesignLower d = d2_design(c);
    if (d.value > e.lower) {
      e.lower = d.value;
      e.lower_cert = {{"type", "design_weights"},
                      {"functionals", json_columns(d.functionals)},
                      {"weights", json_vector(d.weights)},
                      {"value", d.value}};
    }
    if (d.factorization.left.cols() > 0) candidates.push_back(std::move(d.factorization));
  }
  HilbertLower h;
  if (c.hilbert() && kind == CrossNorm::Gp) {
    h = g2_dual(c);
    if (h.value > e.lower) {
      e.lower = h.value;
      e.lower_cert = {{"type", "hilbert_pietsch"},
                      {"map", json_rows(h.potential)},
                      {"density", json_columns(h.density)},
                      {"value", h.value}};
    }
    for (const Matrix& E : mu2_recovery(c, h)) {
      Rep r;
      r.left = c.K;
      r.right = E.transpose();
      candidates.push_back(std::move(r));
    }
  }
  const Rep best = search_general(c, kind, std::move(candidates), e.lower);
  e.upper = best.value;
  e.upper_cert = rep_cert(to_string(kind), c.p, best);
  finish(e);
  return e;
}

NormEstimate molecule_estimate(const Context& c, CrossNorm kind) {
  NormEstimate e;
  e.quantity = to_string(kind);
  const InjectiveResult inj = injective_exact(c);
  e.lower = inj.value;
  e.lower_cert = injective_cert(inj);
  const ProjectiveResult proj = projective(c);
  std::vector<Matrix> starts{proj.transport.flow};

  if (kind == CrossNorm::Mu) {
    // mu_p >= g_p: the g_p lower side carries over.
    const NormEstimate g = [&] {
      if (!c.hilbert()) return NormEstimate{};
      const HilbertLower h = g2_dual(c);
      NormEstimate ge;
      ge.lower = h.value;
      ge.lower_cert = {{"type", "hilbert_pietsch"},
                       {"map", json_rows(h.potential)},
                       {"density", json_columns(h.density)},
                       {"value", h.value}};
      for (Matrix& E : mu2_recovery(c, h)) starts.insert(starts.begin(), std::move(E));
      return ge;
    }();
    if (g.lower > e.lower) {
      e.lower = g.lower;
      e.lower_cert = g.lower_cert;
    }
  }
  if (kind == CrossNorm::Cs && c.hilbert()) {
    const CsLower cs = cs2_dual(c);
    if (cs.value > e.lower) {
      e.lower = cs.value;
      e.lower_cert = {{"type", "lip_pietsch_pairing"},
                      {"map", json_rows(cs.potential)},
                      {"functionals", json_columns(cs.functionals)},
                      {"weights", json_vector(cs.weights)},
                      {"value", cs.value}};
    }
    starts.insert(starts.begin(), cs.flow);
  }
  // Exact single-molecule decomposition when M = m_q e^T.
  for (Eigen::Index q = 0; q < c.K.cols(); ++q) {
    const Vector kq = c.K.col(q);
    const Vector e_vec = c.M.transpose() * kq / kq.squaredNorm();
    if ((c.M - kq * e_vec.transpose()).norm() <= 1e-13 * std::max(1.0, c.M.norm())) {
      Matrix E = Matrix::Zero(c.K.cols(), c.E.dim());
      E.row(q) = e_vec.transpose();
      starts.insert(starts.begin(), std::move(E));
      break;
    }
  }
  const MolRep best = search_molecules(c, kind, starts, e.lower);
  e.upper = best.value;
  e.upper_cert = mol_cert(c, kind, best);
  finish(e);
  return e;
}

}  // namespace

NormEstimate cross_norm(CrossNorm kind, const SpaceRef& space, const FinNormedSpace& factor,
                        const Matrix& M, Exponent p, const TensorOptions& options) {
  if (M.rows() != space->free_dim() || M.cols() != factor.dim()) {
    throw InputError("tensor matrix must be (|X|-1) x dim E");
  }
  if (kind != CrossNorm::Projective && kind != CrossNorm::Injective) require_open_exponent(p);
  if (M.cwiseAbs().maxCoeff() == 0.0 || space->free_dim() == 0) {
    return NormEstimate::zero(to_string(kind));
  }
  Context c{space, factor, M, p, options, nullptr, point_pairs(*space), molecule_matrix(*space),
            Vector()};
  c.dist.resize(static_cast<Eigen::Index>(c.pairs.size()));
  for (std::size_t q = 0; q < c.pairs.size(); ++q) {
    c.dist(static_cast<Eigen::Index>(q)) = space->distance(c.pairs[q].first, c.pairs[q].second);
  }
  if (space->size() <= kMaxVertexPoints) {
    c.ball = std::make_shared<const LipBall>(space);
  } else if (kind != CrossNorm::Projective && kind != CrossNorm::Injective) {
    throw CapacityError("cross-norm estimators enumerate the Lipschitz ball; at most " +
                        std::to_string(kMaxVertexPoints) + " points supported");
  }
  switch (kind) {
    case CrossNorm::Injective: return injective_estimate(c);
    case CrossNorm::Projective: return projective_estimate(c);
    case CrossNorm::Dp:
    case CrossNorm::Gp: return chevet_estimate(c, kind);
    case CrossNorm::Mu:
    case CrossNorm::Cs: return molecule_estimate(c, kind);
  }
  throw InternalError("unhandled cross-norm kind");
}

}  // namespace lipnorm
