#include "lipnorm/pietsch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "lipnorm/error.hpp"
#include "lipnorm/lp.hpp"

namespace lipnorm::pietsch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix weighted_gram(const Matrix& v, const Vector& w) {
  Matrix g = Matrix::Zero(v.rows(), v.rows());
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    if (w(j) > 0.0) g.noalias() += w(j) * v.col(j) * v.col(j).transpose();
  }
  return g;
}

// Largest t with x^T Q x = t x^T M x for some x, and a maximizing x.
// Returns +inf (with x in the null space of M) when Q is not dominated.
struct Generalized {
  double t = 0.0;
  std::vector<Vector> directions;  // leading violators first
};

Generalized generalized_top(const Matrix& q, const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Vector& lam = es.eigenvalues();
  const Matrix& r = es.eigenvectors();
  const double lmax = std::max(lam.maxCoeff(), 0.0);
  const double qscale = std::max(q.diagonal().maxCoeff(), 1e-300);
  std::vector<Eigen::Index> range, null;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    (lam(i) > 1e-13 * lmax && lam(i) > 0.0 ? range : null).push_back(i);
  }
  Generalized out;
  if (!null.empty()) {
    Matrix rn(q.rows(), static_cast<Eigen::Index>(null.size()));
    for (std::size_t i = 0; i < null.size(); ++i) rn.col(static_cast<Eigen::Index>(i)) = r.col(null[i]);
    Eigen::SelfAdjointEigenSolver<Matrix> en(rn.transpose() * q * rn);
    if (en.eigenvalues().maxCoeff() > 1e-12 * qscale) {
      out.t = kInf;
      for (Eigen::Index i = en.eigenvalues().size() - 1; i >= 0; --i) {
        if (en.eigenvalues()(i) <= 1e-12 * qscale) break;
        out.directions.push_back(rn * en.eigenvectors().col(i));
      }
      return out;
    }
  }
  if (range.empty()) return out;
  Matrix scaled(q.rows(), static_cast<Eigen::Index>(range.size()));
  for (std::size_t i = 0; i < range.size(); ++i) {
    scaled.col(static_cast<Eigen::Index>(i)) = r.col(range[i]) / std::sqrt(lam(range[i]));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eb(scaled.transpose() * q * scaled);
  const Vector& mu = eb.eigenvalues();
  out.t = std::max(mu(mu.size() - 1), 0.0);
  for (Eigen::Index i = mu.size() - 1; i >= 0 && out.directions.size() < 3; --i) {
    if (i < mu.size() - 1 && mu(i) <= 1.0) break;
    Vector x = scaled * eb.eigenvectors().col(i);
    const double nx = x.norm();
    if (nx > 0.0) out.directions.push_back(x / nx);
  }
  return out;
}

}  // namespace

void psd_sqrt(const Matrix& a, Matrix& root, Matrix& inv_root, double rel_cut) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  const Vector& lam = es.eigenvalues();
  const double lmax = std::max(lam.size() ? lam.maxCoeff() : 0.0, 0.0);
  Vector s(lam.size()), si(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    const bool keep = lam(i) > rel_cut * lmax && lam(i) > 0.0;
    s(i) = keep ? std::sqrt(lam(i)) : 0.0;
    si(i) = keep ? 1.0 / s(i) : 0.0;
  }
  const Matrix& r = es.eigenvectors();
  root = r * s.asDiagonal() * r.transpose();
  inv_root = r * si.asDiagonal() * r.transpose();
}

double residual(const Matrix& u, const Certificate& cert) {
  const Matrix m = weighted_gram(cert.functionals, cert.weights);
  const Matrix diff = cert.constant * cert.constant * m - u.transpose() * u;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (diff + diff.transpose()));
  return es.eigenvalues().size() ? es.eigenvalues().minCoeff() : 0.0;
}

CuttingPlaneResult two_summing_cutting_plane(
    const Matrix& u, Matrix candidates, const std::vector<Vector>& initial_cuts,
    const std::function<double(const Matrix&)>& weak_norm,
    const std::function<Vector(const Vector&)>& grow, const CuttingPlaneOptions& options) {
  const Eigen::Index d = u.cols();
  const Matrix q = u.transpose() * u;
  CuttingPlaneResult out;
  out.upper = kInf;
  out.witness = Matrix::Zero(d, 0);
  if (q.norm() == 0.0) {
    out.upper = 0.0;
    out.certificate = {candidates.leftCols(std::min<Eigen::Index>(1, candidates.cols())),
                       Vector::Ones(std::min<Eigen::Index>(1, candidates.cols())), 0.0};
    return out;
  }

  std::vector<Vector> cuts;
  auto add_cut = [&](Vector x) {
    const double nx = x.norm();
    if (nx == 0.0) return;
    x /= nx;
    for (const auto& c : cuts) {
      if (std::abs(c.dot(x)) > 1.0 - 1e-12) return;
    }
    cuts.push_back(std::move(x));
  };
  auto add_candidate = [&](const Vector& v) {
    for (Eigen::Index j = 0; j < candidates.cols(); ++j) {
      if ((candidates.col(j) - v).norm() < 1e-12 || (candidates.col(j) + v).norm() < 1e-12) return;
    }
    candidates.conservativeResize(Eigen::NoChange, candidates.cols() + 1);
    candidates.col(candidates.cols() - 1) = v;
  };
  for (const auto& x : initial_cuts) add_cut(x);
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(q);
    for (Eigen::Index i = 0; i < d; ++i) add_cut(es.eigenvectors().col(i));
  }
  if (grow) {
    for (const auto& x : cuts) add_candidate(grow(x));
  }

  double best_at_stall = kInf;
  double best_lp = 0.0;
  int stall = 0;
  for (int round = 0; round < options.max_rounds; ++round) {
    out.rounds = round + 1;
    const auto nc = static_cast<Eigen::Index>(cuts.size());
    lp::LinearProgram prog;
    prog.cost = Vector::Ones(candidates.cols());
    prog.A.resize(nc, candidates.cols());
    prog.rhs.resize(nc);
    prog.sense.assign(static_cast<std::size_t>(nc), lp::RowSense::GreaterEqual);
    for (Eigen::Index k = 0; k < nc; ++k) {
      const Vector& x = cuts[static_cast<std::size_t>(k)];
      prog.A.row(k) = (candidates.transpose() * x).array().square().matrix().transpose();
      prog.rhs(k) = (u * x).squaredNorm();
    }
    const lp::Solution sol = lp::solve(prog);
    if (sol.status == lp::Status::Infeasible) {
      if (!grow) throw InternalError("candidate functionals do not norm the domain");
      for (const auto& x : cuts) add_candidate(grow(x));
      continue;
    }
    if (sol.status != lp::Status::Optimal) {
      throw InternalError(std::string("Pietsch LP failed: ") + lp::to_string(sol.status));
    }

    const Vector lam = sol.x.cwiseMax(0.0);
    const double total = lam.sum();
    const Generalized top = generalized_top(q, weighted_gram(candidates, lam));
    if (std::isfinite(top.t) && total > 0.0) {
      const double c = std::sqrt(top.t * total) * (1.0 + 1e-12);
      if (c < out.upper) {
        out.upper = c;
        std::vector<Eigen::Index> support;
        for (Eigen::Index j = 0; j < lam.size(); ++j) {
          if (lam(j) > 0.0) support.push_back(j);
        }
        out.certificate.functionals.resize(d, static_cast<Eigen::Index>(support.size()));
        out.certificate.weights.resize(static_cast<Eigen::Index>(support.size()));
        for (std::size_t i = 0; i < support.size(); ++i) {
          out.certificate.functionals.col(static_cast<Eigen::Index>(i)) = candidates.col(support[i]);
          out.certificate.weights(static_cast<Eigen::Index>(i)) = lam(support[i]) / total;
        }
        out.certificate.constant = c;
      }
    }

    Matrix witness(d, nc);
    for (Eigen::Index k = 0; k < nc; ++k) {
      witness.col(k) = std::sqrt(std::max(sol.y(k), 0.0)) * cuts[static_cast<std::size_t>(k)];
    }
    const double strong = (u * witness).norm();
    if (strong > 0.0) {
      const double weak = weak_norm(witness);
      if (weak > 0.0 && strong / weak > out.lower) {
        out.lower = strong / weak;
        out.witness = witness / weak;
      }
    }

    if (std::isfinite(out.upper) && out.upper - out.lower <= options.target_gap * out.upper) break;
    if (top.directions.empty() || top.t <= 1.0 + 1e-13) break;
    // Progress is either a better certified upper bound or a larger LP
    // value; the latter rises while the former can plateau for many rounds.
    const bool upper_moved = out.upper < best_at_stall * (1.0 - options.stall_improvement);
    const bool lp_moved = total > best_lp * (1.0 + options.stall_improvement);
    if (upper_moved) best_at_stall = out.upper;
    if (lp_moved) best_lp = total;
    if (!std::isfinite(out.upper) || upper_moved || lp_moved) {
      stall = 0;
    } else if (++stall >= options.stall_rounds) {
      break;
    }
    if (round + 1 == options.max_rounds) out.capped = true;
    for (const auto& x : top.directions) {
      add_cut(x);
      if (grow) add_candidate(grow(x));
    }
  }
  return out;
}

DesignResult solve_design(const Matrix& a, int max_iterations, double tol) {
  const Eigen::Index k = a.rows();
  const Eigen::Index n = a.cols();
  DesignResult out;
  out.weights = Vector::Zero(n);
  out.density = Matrix::Identity(k, k) / std::max<double>(1.0, static_cast<double>(k));
  out.inv_sqrt_a = Matrix::Zero(k, k);
  Eigen::Index live = 0;
  for (Eigen::Index p = 0; p < n; ++p) {
    if (a.col(p).norm() > 0.0) ++live;
  }
  if (live == 0) return out;
  for (Eigen::Index p = 0; p < n; ++p) {
    if (a.col(p).norm() > 0.0) out.weights(p) = 1.0 / static_cast<double>(live);
  }

  Vector g(n);
  Matrix root, inv;
  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it + 1;
    psd_sqrt(weighted_gram(a, out.weights), root, inv);
    const double phi = root.trace();
    for (Eigen::Index p = 0; p < n; ++p) g(p) = a.col(p).dot(inv * a.col(p));
    if (g.maxCoeff() <= phi * (1.0 + tol)) break;
    // Multiplicative step; sum_p nu_p g_p = phi keeps nu on the simplex.
    for (Eigen::Index p = 0; p < n; ++p) out.weights(p) *= g(p) / phi;
    out.weights /= out.weights.sum();
  }
  psd_sqrt(weighted_gram(a, out.weights), root, inv);
  out.phi = root.trace();
  out.inv_sqrt_a = inv;

  const double eps = 1e-10 * std::max(out.phi, 1e-300) / static_cast<double>(k);
  const Matrix s = root + eps * Matrix::Identity(k, k);
  const Eigen::LLT<Matrix> llt(s);
  double worst = 0.0;
  for (Eigen::Index p = 0; p < n; ++p) worst = std::max(worst, a.col(p).dot(llt.solve(a.col(p))));
  out.dual_bound = std::sqrt(s.trace() * worst);
  out.density = s / s.trace();
  return out;
}

}  // namespace lipnorm::pietsch
