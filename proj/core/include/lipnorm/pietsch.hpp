#pragma once

#include <functional>
#include <vector>

#include "lipnorm/spaces.hpp"

namespace lipnorm::pietsch {

/// Domination certificate for a 2-summing operator u into a Euclidean space:
/// u^T u <= C^2 * sum_v w_v v v^T with w a probability vector over dual-ball
/// points v (columns of `functionals`).
struct Certificate {
  Matrix functionals;  // d x K
  Vector weights;      // K, nonnegative, sums to one
  double constant = 0.0;
};

/// Most negative eigenvalue of C^2 sum w_v v v^T - u^T u.
double residual(const Matrix& u, const Certificate& cert);

struct CuttingPlaneOptions {
  int max_rounds = 200;
  int stall_rounds = 5;
  double stall_improvement = 1e-7;
  double target_gap = 1e-10;
};

/// Result of the cutting-plane computation of the 2-summing norm.
struct CuttingPlaneResult {
  double lower = 0.0;
  double upper = 0.0;
  Certificate certificate;
  Matrix witness;  // d x N, weak l_2 norm <= 1 over the candidate set
  int rounds = 0;
  bool capped = false;
};

/// 2-summing norm of u : D -> l_2^k with D's dual ball described by
/// candidate functionals. When `grow` is given, each violated direction x
/// also contributes the dual-ball point returned by grow(x); candidates must
/// all have dual norm <= 1. `weak_norm` evaluates the weak l_2 norm of a
/// sequence in D (exactly, or an upper bound) for the lower witness.
CuttingPlaneResult two_summing_cutting_plane(
    const Matrix& u, Matrix candidates, const std::vector<Vector>& initial_cuts,
    const std::function<double(const Matrix&)>& weak_norm,
    const std::function<Vector(const Vector&)>& grow = nullptr,
    const CuttingPlaneOptions& options = {});

/// Concave design problem  max_{nu in simplex} tr((sum_p nu_p a_p a_p^T)^(1/2)).
///
/// Its optimum phi* gives the 2-summing norm of an operator from l_2 into a
/// space normed by max_p |<a_p, .>| (as phi*), and the Chevet-Saphar d_2
/// norm when the a_p run over images of dual-ball vertices.
struct DesignResult {
  Vector weights;  // nu
  double phi = 0.0;          // tr(A^(1/2)) at nu: certified lower value
  /// sqrt(tr(S) * max_p a_p^T S^-1 a_p) for S = A^(1/2) + eps I, positive
  /// definite so the bound needs no range argument. Certified upper value.
  double dual_bound = 0.0;
  Matrix density;     // S / tr(S)
  Matrix inv_sqrt_a;  // pseudo-inverse of A^(1/2)
  int iterations = 0;
};

DesignResult solve_design(const Matrix& a, int max_iterations = 20000, double tol = 1e-11);

/// Symmetric PSD square root and its pseudo-inverse.
void psd_sqrt(const Matrix& a, Matrix& root, Matrix& inv_root, double rel_cut = 1e-12);

}  // namespace lipnorm::pietsch
