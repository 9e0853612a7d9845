#pragma once

#include <vector>

#include "lipnorm/spaces.hpp"

namespace lipnorm::lp {

enum class RowSense { LessEqual, Equal, GreaterEqual };

/// minimize cost^T x  subject to  A x (sense) rhs,  x >= 0.
struct LinearProgram {
  Vector cost;
  Matrix A;
  Vector rhs;
  std::vector<RowSense> sense;

  int rows() const { return static_cast<int>(A.rows()); }
  int cols() const { return static_cast<int>(A.cols()); }
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(Status s);

struct Options {
  int max_iterations = 50000;
  double pivot_tol = 1e-11;
  double cost_tol = 1e-11;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int degenerate_switch = 30;
  int refactor_every = 64;
};

/// Residuals of a primal/dual pair, all in absolute terms.
struct Verification {
  double primal_infeasibility = 0.0;  // max violation of rows and x >= 0
  double dual_infeasibility = 0.0;    // max violation of dual sign and reduced cost
  double gap = 0.0;                   // |c^T x - b^T y|
  double complementarity = 0.0;       // max |x_j * reduced_cost_j| and |y_i * row slack_i|

  double worst() const;
};

struct Solution {
  Status status = Status::IterationLimit;
  double objective = 0.0;
  Vector x;
  /// Row duals with the usual signs for a minimization: y_i >= 0 on
  /// GreaterEqual rows, y_i <= 0 on LessEqual rows, free on Equal rows,
  /// and cost - A^T y >= 0.
  Vector y;
  int iterations = 0;
  Verification check;
};

/// Two-phase revised simplex with a dense explicit basis inverse.
///
/// Entering columns are chosen by most negative reduced cost; after a run of
/// degenerate pivots the rule switches to Bland's smallest-index rule until
/// the objective moves again. Every optimal result is re-verified by
/// `verify` before it is returned.
Solution solve(const LinearProgram& lp, const Options& options = {});

Verification verify(const LinearProgram& lp, const Vector& x, const Vector& y);

}  // namespace lipnorm::lp
