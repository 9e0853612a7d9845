#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lipnorm/free_space.hpp"

namespace lipnorm {

/// Unordered pairs {x, y} of points of X, x < y, in a fixed order.
std::vector<std::pair<std::size_t, std::size_t>> point_pairs(const PointedMetricSpace& X);

/// Incidence matrix: column p holds the coordinates of the molecule of pair p.
Matrix molecule_matrix(const PointedMetricSpace& X);

/// Euclidean projection onto the radius-r ball of the dual of E.
/// Exact for l_1, l_2 and l_inf; radial scaling otherwise.
Vector project_dual_ball(const Vector& v, const FinNormedSpace& E, double r);

struct TransportOptions {
  int max_iterations = 40000;
  int check_every = 25;
  double rel_gap = 1e-10;
};

/// Vector-valued transport on X with values in E:
///   min sum_p c_p ||g_p||_E  subject to  sum_p molecule_p g_p^T = M,
///   max <Y, M>               subject to  ||Y_x - Y_y||_{E*} <= c_p,
/// where M is (|X|-1) x dim E and Y rows are indexed like M (base row 0).
/// With c = d this is the projective tensor norm of M on F(X) (x) E.
struct TransportResult {
  double lower = 0.0;
  double upper = 0.0;
  Matrix flow;       // P x dim E, feasible: sum_p molecule_p flow_p^T = M
  Matrix potential;  // (|X|-1) x dim E, feasible for the dual constraints
  int iterations = 0;
};

/// Primal-dual (Chambolle-Pock) iteration. Every certificate is repaired to
/// exact feasibility before evaluation, so lower/upper are valid bounds at
/// any iteration count. `costs` defaults to the pair distances.
TransportResult vector_transport(const PointedMetricSpace& X, const Matrix& M,
                                 const FinNormedSpace& E,
                                 const std::optional<Vector>& costs = std::nullopt,
                                 const TransportOptions& options = {});

}  // namespace lipnorm
