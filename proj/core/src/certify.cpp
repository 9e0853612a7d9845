// Independent re-verification of estimator certificates. Every value is
// recomputed from the certificate payload and the subject alone; the only
// shared code is the norm evaluation of explicit objects.
//
// Lower-side witnesses are renormalized onto the feasible set before use
// (dividing by their actual dual norm keeps them valid), so rounding in the
// payload costs only the corresponding relative amount of the bound.

#include "lipnorm/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lipnorm/error.hpp"
#include "lipnorm/json_io.hpp"
#include "lipnorm/pietsch.hpp"
#include "lipnorm/summing.hpp"
#include "lipnorm/transport.hpp"

namespace lipnorm {

void CertificateCheck::merge(const CertificateCheck& other) {
  ok = ok && other.ok;
  residual = std::max(residual, other.residual);
  checked += other.checked;
  failures.insert(failures.end(), other.failures.begin(), other.failures.end());
}

Json subject_json(const FreeVector& m) { return {{"kind", "free_vector"}, {"object", free_vector_json(m)}}; }
Json subject_json(const TensorElement& u) { return {{"kind", "tensor"}, {"object", tensor_json(u)}}; }
Json subject_json(const LinearOperator& u) { return {{"kind", "operator"}, {"object", operator_json(u)}}; }
Json subject_json(const LipschitzMap& T) {
  return {{"kind", "lipschitz_map"}, {"object", lipschitz_map_json(T)}};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Subject {
  std::optional<FreeVector> vector;
  std::optional<TensorElement> tensor;
  Matrix M;  // canonical matrix of the tensor
  std::optional<LinearOperator> op;
  std::optional<LipschitzMap> map;

  static Subject parse(const Json& j) {
    Subject s;
    const std::string kind = j.value("kind", "");
    if (!j.contains("object")) throw InputError("subject has no \"object\"");
    const Json& o = j.at("object");
    if (kind == "free_vector") {
      s.vector = parse_free_vector(o);
    } else if (kind == "tensor") {
      s.tensor = parse_tensor(o);
      s.M = phi(*s.tensor).matrix;
    } else if (kind == "operator") {
      s.op = parse_operator(o);
    } else if (kind == "lipschitz_map") {
      s.map = parse_lipschitz_map(o);
      s.op = linearize(*s.map);
    } else {
      throw InputError("unknown subject kind '" + kind + "'");
    }
    return s;
  }

  bool is_zero() const {
    if (vector) return vector->coeffs().isZero(0.0);
    if (tensor) return M.isZero(0.0);
    if (op) return op->matrix().isZero(0.0);
    return true;
  }

  const TensorElement& need_tensor() const {
    if (!tensor) throw InputError("certificate needs a tensor subject");
    return *tensor;
  }
  const LinearOperator& need_op() const {
    if (!op) throw InputError("certificate needs an operator or map subject");
    return *op;
  }
  const LipschitzMap& need_map() const {
    if (!map) throw InputError("certificate needs a Lipschitz map subject");
    return *map;
  }
  const FreeVector& need_vector() const {
    if (!vector) throw InputError("certificate needs a free-vector subject");
    return *vector;
  }
};

// Feasibility defects found while recomputing a certificate.
struct Defects {
  double worst = 0.0;
  std::vector<std::string> notes;
  void add(double r, const std::string& what) {
    if (r > kCertifyTol) notes.push_back(what + " (residual " + std::to_string(r) + ")");
    worst = std::max(worst, r);
  }
};

Exponent exponent_of(const Json& cert) {
  if (!cert.contains("p")) return Exponent::finite(2.0);
  const Json& p = cert.at("p");
  return p.is_string() ? Exponent::parse(p.get<std::string>()) : Exponent::finite(p.get<double>());
}

double rel(double excess, double scale) { return std::max(0.0, excess) / std::max(1.0, std::abs(scale)); }

Matrix normalized_lip_functionals(const SpaceRef& X, Matrix F) {
  for (Eigen::Index i = 0; i < F.cols(); ++i) {
    const double l = LipschitzFunctional::from_coords(X, F.col(i)).lip_constant();
    if (l > 0) F.col(i) /= l;
  }
  return F;
}

Vector simplex(const Vector& w) {
  Vector v = w.cwiseMax(0.0);
  const double s = v.sum();
  return s > 0 ? Vector(v / s) : v;
}

// Lipschitz constant of a map given by rows over non-base points (base row
// zero) into the normed space E.
double map_lip(const PointedMetricSpace& X, const Matrix& rows, const FinNormedSpace& E,
               const std::optional<Vector>& costs = std::nullopt) {
  const auto pairs = point_pairs(X);
  auto row = [&](std::size_t x) -> Vector {
    const int c = X.coord(x);
    return c >= 0 ? Vector(rows.row(c).transpose()) : Vector::Zero(rows.cols());
  };
  double lip = 0.0;
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const auto [x, y] = pairs[q];
    const double diff = E.norm(row(x) - row(y));
    const double c = costs ? (*costs)(static_cast<Eigen::Index>(q)) : X.distance(x, y);
    if (diff == 0.0) continue;
    lip = std::max(lip, c > 0 ? diff / c : kInf);
  }
  return lip;
}

double tensor_rep_value(const Json& cert, const TensorElement& u, const Matrix& M, Defects& d) {
  const auto& X = u.space();
  const FinNormedSpace& E = u.factor();
  const std::string type = cert.at("type");
  const CrossNorm kind = parse_cross_norm(cert.at("kind"));
  const Exponent p = exponent_of(cert);
  const double scale = std::max(1.0, M.norm());
  if (type == "tensor_rep") {
    const Matrix L = parse_columns(cert.at("left"), X->free_dim());
    const Matrix R = parse_columns(cert.at("right"), E.dim());
    if (L.cols() != R.cols()) throw InputError("representation factors differ in length");
    d.add((L * R.transpose() - M).norm() / scale, "representation does not reproduce the tensor");
    if (kind == CrossNorm::Projective && X->size() > kMaxVertexPoints) {
      double v = 0.0;
      for (Eigen::Index i = 0; i < L.cols(); ++i) {
        v += ae_norm(FreeVector(X, L.col(i))).estimate.upper * E.norm(R.col(i));
      }
      return v;
    }
    const LipBall ball(X);
    return rep_value(kind, ball, E, L, R, p);
  }
  if (type == "molecule_rep") {
    MoleculeRep rep;
    for (const auto& pr : cert.at("pairs")) {
      rep.pairs.emplace_back(X->index_of(pr.at(0)), X->index_of(pr.at(1)));
    }
    rep.multiplicity = parse_vector(cert.at("multiplicity"));
    rep.vectors = parse_columns(cert.at("vectors"), E.dim());
    d.add((molecule_rep_matrix(*X, rep) - M).norm() / scale,
          "molecule representation does not reproduce the tensor");
    const LipBall ball(X);
    return molecule_rep_value(kind, ball, E, rep, p);
  }
  throw InputError("expected a tensor representation, got '" + type + "'");
}

LinearOperator into_euclidean(const LinearOperator& u) {
  const FinNormedSpace l2(u.codomain().dim(), Exponent::finite(2.0));
  if (u.domain_is_free()) return LinearOperator::on_free_space(u.free_domain(), l2, u.matrix());
  return LinearOperator::on_normed(u.normed_domain(), l2, u.matrix());
}

double pietsch_value(const Json& cert, const LinearOperator& u, Defects& d) {
  if (!u.codomain().is_euclidean()) throw InputError("Pietsch l_2 certificate needs a Euclidean codomain");
  Matrix F = parse_columns(cert.at("functionals"), u.domain_dim());
  for (Eigen::Index i = 0; i < F.cols(); ++i) {
    const double n = domain_dual_norm(u, F.col(i));
    if (n > 0) F.col(i) /= n;
  }
  const pietsch::Certificate c{F, simplex(parse_vector(cert.at("weights"))),
                               cert.at("constant").get<double>()};
  const Matrix q = u.matrix().transpose() * u.matrix();
  d.add(rel(-pietsch::residual(u.matrix(), c), q.norm()), "Pietsch domination fails");
  return c.constant;
}

double density_value(const Json& cert, const LinearOperator& u, Defects& d) {
  if (!u.codomain().is_euclidean()) throw InputError("Hilbert density certificate needs a Euclidean codomain");
  const int k = u.codomain().dim();
  Matrix S = parse_rows(cert.at("density"), k);
  S = 0.5 * (S + S.transpose());
  const double tr = S.trace();
  if (!(tr > 0)) throw InputError("density has nonpositive trace");
  S /= tr;
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) {
    d.add(1.0, "density is not positive definite");
    return kInf;
  }
  const Matrix a = u.matrix() * domain_extreme_points(u);
  const Matrix sol = llt.solve(a);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) worst = std::max(worst, a.col(j).dot(sol.col(j)));
  return std::sqrt(std::max(worst, 0.0));
}

double op_norm_value(const LinearOperator& u, const std::string& type) {
  const Matrix& A = u.matrix();
  const Codomain& G = u.codomain();
  if (type == "extreme_point_max") {
    const Matrix ext = domain_extreme_points(u);
    double v = 0.0;
    for (Eigen::Index j = 0; j < ext.cols(); ++j) v = std::max(v, G.norm(A * ext.col(j)));
    return v;
  }
  if (type == "spectral") {
    if (u.domain_is_free() || !u.normed_domain().is_euclidean() || !G.is_euclidean()) {
      throw InputError("spectral certificate needs l_2 -> l_2");
    }
    return Eigen::JacobiSVD<Matrix>(A).singularValues()(0);
  }
  if (type == "row_norm_max") {
    if (u.domain_is_free() || G.is_free() || !G.normed().exponent().is_infinite()) {
      throw InputError("row-norm certificate needs l_q -> l_inf");
    }
    double v = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) v = std::max(v, u.normed_domain().dual_norm(A.row(i).transpose()));
    return v;
  }
  if (type == "column_bound") {
    if (u.domain_is_free()) throw InputError("column bound needs an l_q domain");
    double col = 0.0;
    for (Eigen::Index j = 0; j < A.cols(); ++j) col = std::max(col, G.norm(A.col(j)));
    const Exponent q = u.normed_domain().exponent();
    const double inv = q.is_infinite() ? 0.0 : 1.0 / q.value();
    return col * std::pow(static_cast<double>(A.cols()), 1.0 - inv);
  }
  throw InputError("unknown operator-norm certificate '" + type + "'");
}

double domain_norm(const LinearOperator& u, const Vector& x) {
  if (u.domain_is_free()) return ae_norm(FreeVector(u.free_domain(), x)).estimate.upper;
  return u.normed_domain().norm(x);
}

// Certified lower value of a lower-side certificate.
double lower_value(const Json& cert, const Subject& s, Defects& d) {
  const std::string type = cert.at("type");
  if (type == "zero") return 0.0;
  if (type == "lip_functional") {
    const FreeVector& m = s.need_vector();
    const LipschitzFunctional f(m.space(), parse_vector(cert.at("values")));
    const double l = f.lip_constant();
    const double v = pair(f, m);
    return l > 0 ? v / l : 0.0;
  }
  if (type == "injective_pairing") {
    const TensorElement& u = s.need_tensor();
    const Vector f = parse_vector(cert.at("functional"));
    const Vector g = parse_vector(cert.at("dual"));
    const double l = LipschitzFunctional::from_coords(u.space(), f).lip_constant();
    const double n = u.factor().dual_norm(g);
    return l > 0 && n > 0 ? std::abs(f.dot(s.M * g)) / (l * n) : 0.0;
  }
  if (type == "lip_map_pairing") {
    const TensorElement& u = s.need_tensor();
    const Matrix Y = parse_rows(cert.at("map"), u.factor().dim());
    const double l = map_lip(*u.space(), Y, u.factor().dual());
    return l > 0 ? (Y.array() * s.M.array()).sum() / l : 0.0;
  }
  if (type == "design_weights") {
    const TensorElement& u = s.need_tensor();
    if (!u.factor().is_euclidean()) throw InputError("design certificate needs a Euclidean factor");
    const Matrix F = normalized_lip_functionals(u.space(), parse_columns(cert.at("functionals"), u.space()->free_dim()));
    const Vector w = simplex(parse_vector(cert.at("weights")));
    const Matrix D = F * w.asDiagonal() * F.transpose();
    Matrix root, inv;
    pietsch::psd_sqrt(s.M.transpose() * D * s.M, root, inv);
    return root.trace();
  }
  if (type == "hilbert_pietsch") {
    const TensorElement& u = s.need_tensor();
    if (!u.factor().is_euclidean()) throw InputError("Hilbert certificate needs a Euclidean factor");
    const int k = u.factor().dim();
    const Matrix Y = parse_rows(cert.at("map"), k);
    Matrix S = parse_columns(cert.at("density"), k);
    S = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    d.add(rel(-es.eigenvalues().minCoeff(), S.norm()), "density is not positive semidefinite");
    const double l = map_lip(*u.space(), Y, u.factor());
    const double fn = S.norm();
    return l > 0 && fn > 0 ? (Y.array() * (s.M * S).array()).sum() / (l * fn) : 0.0;
  }
  if (type == "lip_pietsch_pairing") {
    const TensorElement& u = s.need_tensor();
    if (!u.factor().is_euclidean()) throw InputError("Pietsch pairing needs a Euclidean factor");
    const auto& X = *u.space();
    const Matrix F = normalized_lip_functionals(u.space(), parse_columns(cert.at("functionals"), X.free_dim()));
    const Vector w = simplex(parse_vector(cert.at("weights")));
    const Matrix K = molecule_matrix(X);
    const Matrix vals = (K.transpose() * F).array().square().matrix();  // P x K
    const Vector costs = (vals * w).cwiseSqrt();
    const Matrix Y = parse_rows(cert.at("map"), u.factor().dim());
    const double l = map_lip(X, Y, u.factor(), costs);
    return l > 0 && std::isfinite(l) ? (Y.array() * s.M.array()).sum() / l : 0.0;
  }
  if (type == "sequence_witness") {
    const LinearOperator& op = s.need_op();
    return sequence_ratio(op, parse_columns(cert.at("sequence"), op.domain_dim()), exponent_of(cert));
  }
  if (type == "adjoint_sequence") {
    const LinearOperator& op = s.need_op();
    return adjoint_sequence_ratio(op, parse_columns(cert.at("sequence"), op.codomain().dim()),
                                  exponent_of(cert));
  }
  if (type == "molecule_witness") {
    const LipschitzMap& T = s.need_map();
    const auto& X = T.domain();
    const Json& pairs = cert.at("pairs");
    const Vector scales = parse_vector(cert.at("scales"));
    if (static_cast<Eigen::Index>(pairs.size()) != scales.size()) throw InputError("molecule witness lengths differ");
    Matrix seq(X->free_dim(), scales.size());
    for (Eigen::Index i = 0; i < scales.size(); ++i) {
      const Json& pr = pairs[static_cast<std::size_t>(i)];
      seq.col(i) = scales(i) * molecule(X, X->index_of(pr.at(0)), X->index_of(pr.at(1))).coeffs();
    }
    return sequence_ratio(s.need_op(), seq, exponent_of(cert));
  }
  if (type == "sl_pairing") {
    const LipschitzMap& T = s.need_map();
    const TensorElement u = parse_tensor(cert.at("tensor"));
    const double pairing = pair_with_map(T, u);
    Subject sub;
    sub.tensor = u;
    sub.M = phi(u).matrix;
    const double dp = tensor_rep_value(cert.at("dp_rep"), u, sub.M, d);
    return dp > 0 ? std::abs(pairing) / dp : 0.0;
  }
  if (type == "norming_vector") {
    const LinearOperator& op = s.need_op();
    const Vector x = parse_vector(cert.at("vector"));
    const double n = domain_norm(op, x);
    return n > 0 ? op.codomain().norm(op.matrix() * x) / n : 0.0;
  }
  if (type == "pair_ratio") {
    const LipschitzMap& T = s.need_map();
    const Json& pr = cert.at("pair");
    const auto x = T.domain()->index_of(pr.at(0)), y = T.domain()->index_of(pr.at(1));
    return T.codomain().norm(T.value(x) - T.value(y)) / T.domain()->distance(x, y);
  }
  throw InputError("unsupported lower certificate type '" + type + "'");
}

// Certified upper value of an upper-side certificate.
double upper_value(const Json& cert, const Subject& s, Defects& d) {
  const std::string type = cert.at("type");
  if (type == "zero") {
    if (!s.is_zero()) d.add(1.0, "zero upper bound for a nonzero subject");
    return 0.0;
  }
  if (type == "ae_flow") {
    const FreeVector& m = s.need_vector();
    const auto& X = *m.space();
    const auto n = static_cast<Eigen::Index>(X.size());
    const Matrix flow = parse_rows(cert.at("flow"), n);
    if (flow.rows() != n) throw InputError("flow must be n x n");
    const Vector bal = m.balanced();
    const double scale = bal.cwiseAbs().sum();
    d.add(rel(-flow.minCoeff(), scale), "negative flow");
    const Vector net = flow.rowwise().sum() - flow.colwise().sum().transpose();
    d.add((net - bal).cwiseAbs().maxCoeff() / std::max(1.0, scale), "flow does not balance");
    return (flow.array() * X.distances().array()).sum();
  }
  if (type == "vertex_enumeration") {
    const TensorElement& u = s.need_tensor();
    const LipBall ball(u.space());
    double v = 0.0;
    const Matrix img = s.M.transpose() * ball.vertices();
    for (Eigen::Index j = 0; j < img.cols(); ++j) v = std::max(v, u.factor().norm(img.col(j)));
    return v;
  }
  if (type == "tensor_rep" || type == "molecule_rep") {
    return tensor_rep_value(cert, s.need_tensor(), s.M, d);
  }
  if (type == "pietsch_l2") return pietsch_value(cert, s.need_op(), d);
  if (type == "hilbert_density") return density_value(cert, s.need_op(), d);
  if (type == "factor_bound") {
    const LinearOperator& op = s.need_op();
    const Json& inner = cert.at("inner");
    const LinearOperator e2 = into_euclidean(op);
    if (inner.at("type") == "pietsch_l2") return euclidean_to(op.codomain()) * pietsch_value(inner, e2, d);
    if (inner.at("type") == "hilbert_density") {
      return dual_to_euclidean(op.codomain()) * density_value(inner, e2, d);
    }
    throw InputError("unsupported inner certificate in factor bound");
  }
  if (type == "nuclear_rep") {
    const LinearOperator& op = s.need_op();
    const Matrix F = parse_columns(cert.at("functionals"), op.domain_dim());
    const Matrix Y = parse_columns(cert.at("vectors"), op.codomain().dim());
    if (F.cols() != Y.cols()) throw InputError("nuclear representation lengths differ");
    d.add((Y * F.transpose() - op.matrix()).norm() / std::max(1.0, op.matrix().norm()),
          "nuclear representation does not reproduce the operator");
    double v = 0.0;
    for (Eigen::Index i = 0; i < F.cols(); ++i) v += domain_dual_norm(op, F.col(i)) * op.codomain().norm(Y.col(i));
    return v;
  }
  if (type == "lip_pietsch") {
    const LipschitzMap& T = s.need_map();
    const auto& X = *T.domain();
    const double p = exponent_of(cert).value();
    const Matrix F = normalized_lip_functionals(T.domain(), parse_columns(cert.at("functionals"), X.free_dim()));
    const Vector w = simplex(parse_vector(cert.at("weights")));
    const auto pairs = point_pairs(X);
    const Matrix K = molecule_matrix(X);
    double need = 0.0;  // smallest C^p dominating every pair
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const auto [x, y] = pairs[q];
      const double dist = X.distance(x, y);
      const double lhs = std::pow(T.codomain().norm(T.value(x) - T.value(y)) / dist, p);
      if (lhs == 0.0) continue;
      double dom = 0.0;
      for (Eigen::Index i = 0; i < F.cols(); ++i) {
        dom += w(i) * std::pow(std::abs(F.col(i).dot(K.col(static_cast<Eigen::Index>(q)))) / dist, p);
      }
      need = std::max(need, dom > 0 ? lhs / dom : kInf);
    }
    return std::pow(need, 1.0 / p);
  }
  if (type == "extreme_point_max" || type == "spectral" || type == "row_norm_max" ||
      type == "column_bound") {
    return op_norm_value(s.need_op(), type);
  }
  if (type == "pair_max") return s.need_map().lip_constant();
  throw InputError("unsupported upper certificate type '" + type + "'");
}

CertificateCheck check_side(const Json& cert, const Subject& s, double claimed, bool lower,
                            const std::string& quantity) {
  CertificateCheck out;
  const char* side = lower ? "lower" : "upper";
  if (!cert.is_object() || cert.empty()) {
    if (lower && claimed <= 0.0) return out;
    out.ok = false;
    out.residual = 1.0;
    out.failures.push_back(quantity + ": missing " + side + " certificate");
    return out;
  }
  out.checked = 1;
  Defects d;
  double value = 0.0;
  try {
    value = lower ? lower_value(cert, s, d) : upper_value(cert, s, d);
  } catch (const std::exception& e) {
    out.ok = false;
    out.residual = 1.0;
    out.failures.push_back(quantity + " " + side + ": " + e.what());
    return out;
  }
  const double gap = lower ? claimed - value : value - claimed;
  d.add(std::isfinite(value) ? rel(gap, claimed) : 1.0,
        std::string("recomputed ") + side + " value " + std::to_string(value) + " vs claimed " +
            std::to_string(claimed));
  out.residual = d.worst;
  out.ok = d.worst < kCertifyTol;
  for (const auto& n : d.notes) out.failures.push_back(quantity + " " + side + ": " + n);
  return out;
}

}  // namespace

CertificateCheck verify_estimate(const NormEstimate& e, const Json& subject) {
  CertificateCheck out;
  Subject s;
  try {
    s = Subject::parse(subject);
  } catch (const std::exception& ex) {
    out.ok = false;
    out.residual = 1.0;
    out.failures.push_back(e.quantity + ": bad subject: " + ex.what());
    return out;
  }
  if (e.lower > e.upper * (1.0 + kCertifyTol) + kCertifyTol) {
    out.ok = false;
    out.residual = std::max(out.residual, rel(e.lower - e.upper, e.upper));
    out.failures.push_back(e.quantity + ": lower bound exceeds upper bound");
  }
  out.merge(check_side(e.lower_cert, s, e.lower, true, e.quantity));
  out.merge(check_side(e.upper_cert, s, e.upper, false, e.quantity));
  return out;
}

}  // namespace lipnorm
