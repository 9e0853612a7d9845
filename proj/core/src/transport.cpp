#include "lipnorm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lipnorm/error.hpp"

namespace lipnorm {

std::vector<std::pair<std::size_t, std::size_t>> point_pairs(const PointedMetricSpace& X) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t j = i + 1; j < X.size(); ++j) out.emplace_back(i, j);
  }
  return out;
}

Matrix molecule_matrix(const PointedMetricSpace& X) {
  const auto pairs = point_pairs(X);
  Matrix k = Matrix::Zero(X.free_dim(), static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const int cx = X.coord(pairs[p].first), cy = X.coord(pairs[p].second);
    if (cx >= 0) k(cx, static_cast<Eigen::Index>(p)) = 1.0;
    if (cy >= 0) k(cy, static_cast<Eigen::Index>(p)) = -1.0;
  }
  return k;
}

namespace {

// Euclidean projection onto {|v|_1 <= r} by sorting magnitudes.
Vector project_l1(const Vector& v, double r) {
  if (v.cwiseAbs().sum() <= r) return v;
  std::vector<double> a(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(v(i));
  std::sort(a.begin(), a.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cum += a[i];
    const double t = (cum - r) / static_cast<double>(i + 1);
    if (i + 1 == a.size() || a[i + 1] <= t) {
      theta = t;
      break;
    }
  }
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double m = std::max(std::abs(v(i)) - theta, 0.0);
    out(i) = v(i) >= 0 ? m : -m;
  }
  return out;
}

}  // namespace

Vector project_dual_ball(const Vector& v, const FinNormedSpace& E, double r) {
  const Exponent q = E.exponent().conjugate();
  if (q.is_infinite()) return v.cwiseMax(-r).cwiseMin(r);
  if (q.is(1.0)) return project_l1(v, r);
  const double n = lp_norm(v, q);
  return n <= r ? v : Vector(v * (r / n));
}

TransportResult vector_transport(const PointedMetricSpace& X, const Matrix& M,
                                 const FinNormedSpace& E, const std::optional<Vector>& costs,
                                 const TransportOptions& options) {
  const Eigen::Index rows = X.free_dim();
  const Eigen::Index k = E.dim();
  if (M.rows() != rows || M.cols() != k) throw InputError("tensor matrix has wrong shape");
  const auto pairs = point_pairs(X);
  const auto np = static_cast<Eigen::Index>(pairs.size());
  const Matrix K = molecule_matrix(X);
  Vector c(np);
  if (costs) {
    if (costs->size() != np) throw InputError("one cost per point pair expected");
    c = *costs;
  } else {
    for (Eigen::Index p = 0; p < np; ++p) {
      c(p) = X.distance(pairs[static_cast<std::size_t>(p)].first,
                        pairs[static_cast<std::size_t>(p)].second);
    }
  }
  if ((c.array() < 0.0).any()) throw InputError("transport costs must be nonnegative");

  TransportResult out;
  out.flow = Matrix::Zero(np, k);
  out.potential = Matrix::Zero(rows, k);
  const double mscale = M.norm();
  const double cscale = c.maxCoeff();
  if (rows == 0 || mscale == 0.0) return out;
  if (cscale == 0.0) {
    out.flow = K.transpose() * (K * K.transpose()).ldlt().solve(M);
    return out;
  }
  const Matrix Mn = M / mscale;
  const Vector cn = c / cscale;

  const Eigen::LDLT<Matrix> kkt((K * K.transpose()).eval());
  auto repair = [&](const Matrix& g) -> Matrix {
    return g + K.transpose() * kkt.solve(Mn - K * g);
  };
  auto primal_value = [&](const Matrix& g) {
    double v = 0.0;
    for (Eigen::Index p = 0; p < np; ++p) v += cn(p) * E.norm(g.row(p).transpose());
    return v;
  };
  // Scale Y so every constraint holds; returns the certified dual value.
  auto dual_value = [&](const Matrix& y, Matrix& feasible) {
    const Matrix diff = K.transpose() * y;
    double worst = 0.0;
    for (Eigen::Index p = 0; p < np; ++p) {
      const double dn = E.dual_norm(diff.row(p).transpose());
      if (cn(p) == 0.0) {
        if (dn > 0.0) return 0.0;
        continue;
      }
      worst = std::max(worst, dn / cn(p));
    }
    if (worst == 0.0) return 0.0;
    feasible = y / worst;
    return (feasible.cwiseProduct(Mn)).sum();
  };

  // Trivial representation: each row sent straight to the base.
  Matrix g = repair(Matrix::Zero(np, k));
  double best_upper = primal_value(g);
  Matrix best_flow = g;
  double best_lower = 0.0;
  Matrix best_pot = Matrix::Zero(rows, k);
  {
    Matrix trivial = Matrix::Zero(np, k);
    for (Eigen::Index p = 0; p < np; ++p) {
      const auto [x, y] = pairs[static_cast<std::size_t>(p)];
      if (y == X.base() && X.coord(x) >= 0) trivial.row(p) = Mn.row(X.coord(x));
      if (x == X.base() && X.coord(y) >= 0) trivial.row(p) = -Mn.row(X.coord(y));
    }
    trivial = repair(trivial);
    const double v = primal_value(trivial);
    if (v < best_upper) {
      best_upper = v;
      best_flow = trivial;
    }
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es((K * K.transpose()).eval(), Eigen::EigenvaluesOnly);
  const double L = std::sqrt(es.eigenvalues().maxCoeff());
  const double sigma = 0.99 / L, tau = 0.99 / L;
  Matrix y = Matrix::Zero(rows, k), ybar = y;
  g = Matrix::Zero(np, k);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    Matrix gn = g + sigma * (K.transpose() * ybar);
    for (Eigen::Index p = 0; p < np; ++p) {
      const Vector v = gn.row(p).transpose();
      gn.row(p) = (v - project_dual_ball(v, E, sigma * cn(p))).transpose();
    }
    g = std::move(gn);
    const Matrix yn = y - tau * (K * g - Mn);
    ybar = 2.0 * yn - y;
    y = yn;

    if ((it + 1) % options.check_every == 0 || it + 1 == options.max_iterations) {
      const Matrix fixed = repair(g);
      const double up = primal_value(fixed);
      if (up < best_upper) {
        best_upper = up;
        best_flow = fixed;
      }
      Matrix feas;
      const double lo = dual_value(y, feas);
      if (lo > best_lower) {
        best_lower = lo;
        best_pot = feas;
      }
      if (best_upper - best_lower <= options.rel_gap * best_upper) {
        ++it;
        break;
      }
    }
  }
  const double scale = mscale * cscale;
  out.lower = best_lower * scale;
  out.upper = best_upper * scale;
  out.flow = best_flow * mscale;
  out.potential = best_pot * cscale;
  out.iterations = it;
  return out;
}

}  // namespace lipnorm
