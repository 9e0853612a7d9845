#pragma once

// Test-side reference computations. None of these call into the estimators
// they are used to check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "lipnorm/lipmap.hpp"

namespace oracle {

using lipnorm::Matrix;
using lipnorm::Vector;

inline double lp(const Vector& v, double p) {
  if (std::isinf(p)) return v.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v(i)), p);
  return std::pow(s, 1.0 / p);
}

// max over pairs of |values(x) - values(y)| / d(x, y), codomain norm given.
template <class Norm>
double lip_pairs(const lipnorm::PointedMetricSpace& X, const Matrix& values, Norm norm) {
  double best = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t j = i + 1; j < X.size(); ++j) {
      const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(j);
      best = std::max(best, norm(Vector(values.col(a) - values.col(b))) / X.distance(i, j));
    }
  }
  return best;
}

// Earth mover cost on the real line: the integral of |cumulative mass|.
// `t` are positions, `c` signed masses summing to zero.
inline double line_transport(std::vector<double> t, std::vector<double> c) {
  std::vector<std::size_t> order(t.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return t[a] < t[b]; });
  double cum = 0.0, total = 0.0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    cum += c[order[k]];
    total += std::abs(cum) * (t[order[k + 1]] - t[order[k]]);
  }
  return total;
}

inline double hilbert_schmidt(const Matrix& a) { return a.norm(); }

inline double spectral(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

}  // namespace oracle
