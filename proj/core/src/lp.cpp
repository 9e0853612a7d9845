#include "lipnorm/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lipnorm/error.hpp"

namespace lipnorm::lp {

const char* to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

double Verification::worst() const {
  return std::max({primal_infeasibility, dual_infeasibility, gap, complementarity});
}

Verification verify(const LinearProgram& lp, const Vector& x, const Vector& y) {
  Verification v;
  const Vector Ax = lp.A * x;
  for (int i = 0; i < lp.rows(); ++i) {
    const double r = Ax(i) - lp.rhs(i);
    double viol = 0.0;
    double dual_viol = 0.0;
    switch (lp.sense[i]) {
      case RowSense::LessEqual: viol = std::max(0.0, r); dual_viol = std::max(0.0, y(i)); break;
      case RowSense::GreaterEqual: viol = std::max(0.0, -r); dual_viol = std::max(0.0, -y(i)); break;
      case RowSense::Equal: viol = std::abs(r); break;
    }
    v.primal_infeasibility = std::max(v.primal_infeasibility, viol);
    v.dual_infeasibility = std::max(v.dual_infeasibility, dual_viol);
    if (lp.sense[i] != RowSense::Equal) {
      v.complementarity = std::max(v.complementarity, std::abs(y(i) * r));
    }
  }
  const Vector reduced = lp.cost - lp.A.transpose() * y;
  for (int j = 0; j < lp.cols(); ++j) {
    v.primal_infeasibility = std::max(v.primal_infeasibility, std::max(0.0, -x(j)));
    v.dual_infeasibility = std::max(v.dual_infeasibility, std::max(0.0, -reduced(j)));
    v.complementarity = std::max(v.complementarity, std::abs(x(j) * reduced(j)));
  }
  v.gap = std::abs(lp.cost.dot(x) - lp.rhs.dot(y));
  return v;
}

namespace {

// Standard-form working problem: min c^T z, M z = b, z >= 0, b >= 0.
class Simplex {
 public:
  Simplex(Matrix M, Vector b, Vector c, std::vector<int> basis, const Options& opt)
      : M_(std::move(M)), b_(std::move(b)), c_(std::move(c)), basis_(std::move(basis)),
        opt_(opt) {
    const int n = static_cast<int>(M_.cols());
    in_basis_.assign(n, -1);
    for (int r = 0; r < static_cast<int>(basis_.size()); ++r) in_basis_[basis_[r]] = r;
    allowed_.assign(n, true);
    refactor();
  }

  void set_cost(Vector c) { c_ = std::move(c); }
  void forbid(int j) { allowed_[j] = false; }

  /// Runs simplex iterations; returns Optimal, Unbounded or IterationLimit.
  Status run(int& iterations) {
    int degenerate_streak = 0;
    bool bland = false;
    const int m = static_cast<int>(M_.rows());
    const int n = static_cast<int>(M_.cols());
    while (iterations < opt_.max_iterations) {
      ++iterations;
      if (++since_refactor_ >= opt_.refactor_every) refactor();
      Vector cb(m);
      for (int r = 0; r < m; ++r) cb(r) = c_(basis_[r]);
      const Vector y = Binv_.transpose() * cb;
      const double scale = std::max(1.0, c_.cwiseAbs().maxCoeff());

      int entering = -1;
      double best = -opt_.cost_tol * scale;
      for (int j = 0; j < n; ++j) {
        if (in_basis_[j] >= 0 || !allowed_[j]) continue;
        const double d = c_(j) - M_.col(j).dot(y);
        if (bland) {
          if (d < -opt_.cost_tol * scale) { entering = j; break; }
        } else if (d < best) {
          best = d;
          entering = j;
        }
      }
      if (entering < 0) return Status::Optimal;

      const Vector dir = Binv_ * M_.col(entering);
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        if (dir(r) <= opt_.pivot_tol) continue;
        const double t = std::max(0.0, xb_(r)) / dir(r);
        // Ties go to the smallest basic variable index.
        if (t < ratio - 1e-14) {
          ratio = t;
          leave = r;
        } else if (t <= ratio + 1e-14 && basis_[r] < basis_[leave]) {
          leave = r;
        }
      }
      if (leave < 0) return Status::Unbounded;

      if (ratio <= 1e-13) {
        if (++degenerate_streak >= opt_.degenerate_switch) bland = true;
      } else {
        degenerate_streak = 0;
        bland = false;
      }
      pivot(leave, entering, dir);
    }
    return Status::IterationLimit;
  }

  /// Moves basic columns in `forbidden` out of the basis where possible.
  void drive_out(const std::vector<bool>& forbidden) {
    const int m = static_cast<int>(M_.rows());
    for (int r = 0; r < m; ++r) {
      if (!forbidden[basis_[r]]) continue;
      const Vector row = Binv_.row(r) * M_;
      int best = -1;
      double mag = 1e-9;
      for (int j = 0; j < static_cast<int>(M_.cols()); ++j) {
        if (in_basis_[j] >= 0 || forbidden[j] || !allowed_[j]) continue;
        if (std::abs(row(j)) > mag) { mag = std::abs(row(j)); best = j; }
      }
      if (best >= 0) {
        const Vector dir = Binv_ * M_.col(best);
        pivot(r, best, dir);
      }
    }
  }

  Vector primal() const {
    Vector z = Vector::Zero(M_.cols());
    for (int r = 0; r < static_cast<int>(basis_.size()); ++r) z(basis_[r]) = std::max(0.0, xb_(r));
    return z;
  }

  Vector duals() const {
    const int m = static_cast<int>(M_.rows());
    Vector cb(m);
    for (int r = 0; r < m; ++r) cb(r) = c_(basis_[r]);
    return Binv_.transpose() * cb;
  }

  void refactor() {
    const int m = static_cast<int>(M_.rows());
    Matrix B(m, m);
    for (int r = 0; r < m; ++r) B.col(r) = M_.col(basis_[r]);
    Eigen::PartialPivLU<Matrix> lu(B);
    Binv_ = lu.inverse();
    xb_ = Binv_ * b_;
    since_refactor_ = 0;
  }

 private:
  void pivot(int leave, int entering, const Vector& dir) {
    const double piv = dir(leave);
    Binv_.row(leave) /= piv;
    xb_(leave) /= piv;
    for (int r = 0; r < static_cast<int>(M_.rows()); ++r) {
      if (r == leave || dir(r) == 0.0) continue;
      Binv_.row(r) -= dir(r) * Binv_.row(leave);
      xb_(r) -= dir(r) * xb_(leave);
    }
    in_basis_[basis_[leave]] = -1;
    basis_[leave] = entering;
    in_basis_[entering] = leave;
  }

  Matrix M_;
  Vector b_;
  Vector c_;
  std::vector<int> basis_;
  std::vector<int> in_basis_;
  std::vector<bool> allowed_;
  Matrix Binv_;
  Vector xb_;
  Options opt_;
  int since_refactor_ = 0;
};

}  // namespace

Solution solve(const LinearProgram& lp, const Options& options) {
  const int m = lp.rows();
  const int n = lp.cols();
  if (lp.cost.size() != n || lp.rhs.size() != m || static_cast<int>(lp.sense.size()) != m) {
    throw InputError("linear program dimensions are inconsistent");
  }

  // Columns: original n, one slack/surplus per inequality row, one artificial per row.
  std::vector<int> slack_col(m, -1);
  int cols = n;
  for (int i = 0; i < m; ++i) {
    if (lp.sense[i] != RowSense::Equal) slack_col[i] = cols++;
  }
  const int first_art = cols;
  cols += m;

  Matrix M = Matrix::Zero(m, cols);
  Vector b(m);
  std::vector<double> flip(m, 1.0);
  M.leftCols(n) = lp.A;
  for (int i = 0; i < m; ++i) {
    if (lp.sense[i] == RowSense::LessEqual) M(i, slack_col[i]) = 1.0;
    if (lp.sense[i] == RowSense::GreaterEqual) M(i, slack_col[i]) = -1.0;
    b(i) = lp.rhs(i);
    if (b(i) < 0) {
      M.row(i) *= -1.0;
      b(i) = -b(i);
      flip[i] = -1.0;
    }
  }
  std::vector<int> basis(m);
  std::vector<bool> artificial(cols, false);
  for (int i = 0; i < m; ++i) {
    // A slack with coefficient +1 after flipping is a ready-made basic column.
    if (slack_col[i] >= 0 && M(i, slack_col[i]) > 0) {
      basis[i] = slack_col[i];
    } else {
      basis[i] = first_art + i;
    }
    M(i, first_art + i) = 1.0;
    artificial[first_art + i] = true;
  }

  Solution sol;
  Vector phase1 = Vector::Zero(cols);
  for (int i = 0; i < m; ++i) phase1(first_art + i) = 1.0;
  Simplex simplex(M, b, phase1, basis, options);
  for (int i = 0; i < m; ++i) {
    if (basis[i] != first_art + i) simplex.forbid(first_art + i);
  }
  Status st = simplex.run(sol.iterations);
  if (st == Status::IterationLimit) {
    sol.status = st;
    return sol;
  }
  const double infeas = simplex.primal().tail(m).sum();
  if (infeas > 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff())) {
    sol.status = Status::Infeasible;
    return sol;
  }
  simplex.drive_out(artificial);
  for (int j = first_art; j < cols; ++j) simplex.forbid(j);

  Vector c2 = Vector::Zero(cols);
  c2.head(n) = lp.cost;
  simplex.set_cost(c2);
  simplex.refactor();
  st = simplex.run(sol.iterations);
  sol.status = st;
  if (st != Status::Optimal) return sol;

  simplex.refactor();
  const Vector z = simplex.primal();
  const Vector w = simplex.duals();
  sol.x = z.head(n);
  sol.y.resize(m);
  for (int i = 0; i < m; ++i) sol.y(i) = flip[i] * w(i);
  sol.objective = lp.cost.dot(sol.x);
  sol.check = verify(lp, sol.x, sol.y);
  return sol;
}

}  // namespace lipnorm::lp
