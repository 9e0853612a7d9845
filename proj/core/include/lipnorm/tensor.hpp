#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lipnorm/estimate.hpp"
#include "lipnorm/free_space.hpp"
#include "lipnorm/lipmap.hpp"
#include "lipnorm/optim.hpp"

namespace lipnorm {

/// delta_(x,y) [x] e.
struct TensorTerm {
  std::size_t x = 0;
  std::size_t y = 0;
  Vector e;
};

/// Element of the Lipschitz tensor product X [x] E, held as a list of terms.
/// Terms with x == y or e == 0 are dropped on construction.
class TensorElement {
 public:
  TensorElement(SpaceRef space, FinNormedSpace factor, std::vector<TensorTerm> terms);

  /// Representation sum_x delta_(x, base) [x] M.row(coord(x)).
  static TensorElement from_matrix(SpaceRef space, FinNormedSpace factor, const Matrix& M);

  const SpaceRef& space() const { return space_; }
  const FinNormedSpace& factor() const { return factor_; }
  const std::vector<TensorTerm>& terms() const { return terms_; }

  TensorElement operator+(const TensorElement& other) const;
  TensorElement operator-() const;
  TensorElement operator*(double s) const;

 private:
  SpaceRef space_;
  FinNormedSpace factor_;
  std::vector<TensorTerm> terms_;
};

/// Sum of m_i [x] e_i in F(X) [x] E with its canonical matrix
/// M = sum coeffs(m_i) e_i^T of size (|X|-1) x dim E.
struct TensorImage {
  SpaceRef space;
  FinNormedSpace factor;
  std::vector<std::pair<FreeVector, Vector>> pairs;
  Matrix matrix;

  /// Image built from an arbitrary representation in F(X) [x] E.
  static TensorImage from_pairs(SpaceRef space, FinNormedSpace factor,
                                std::vector<std::pair<FreeVector, Vector>> pairs);
};

TensorImage phi(const TensorElement& u);

/// sum_i <T(x_i) - T(y_i), e_i>. T's codomain must be the dual of u's factor.
double pair_with_map(const LipschitzMap& T, const TensorElement& u);

enum class CrossNorm { Projective, Injective, Dp, Gp, Mu, Cs };

const char* to_string(CrossNorm kind);
/// Accepts piL, epsL, dpL, gpL, mu, cs.
CrossNorm parse_cross_norm(const std::string& name);

struct TensorOptions {
  unsigned long long seed = kDefaultSeed;
  /// Seeded restarts for representation search.
  int restarts = 64;
  /// Restarts for the alternating dual ascent of g_2.
  int dual_restarts = 6;
  int threads = 1;
};

/// Cross-norm of the canonical matrix M of an element of F(X) [x] E. The
/// result depends on M only; every estimator returns a certified bracket.
/// Exponent-indexed norms require p in (1, inf).
NormEstimate cross_norm(CrossNorm kind, const SpaceRef& space, const FinNormedSpace& factor,
                        const Matrix& M, Exponent p = Exponent::finite(2.0),
                        const TensorOptions& options = {});

NormEstimate proj_norm_l(const TensorElement& u, const TensorOptions& options = {});
NormEstimate inj_norm_l(const TensorElement& u, const TensorOptions& options = {});
NormEstimate dp_norm_l(const TensorElement& u, Exponent p, const TensorOptions& options = {});
NormEstimate gp_norm_l(const TensorElement& u, Exponent p, const TensorOptions& options = {});
NormEstimate mu_norm(const TensorElement& u, Exponent p, const TensorOptions& options = {});
NormEstimate cs_norm(const TensorElement& u, Exponent p, const TensorOptions& options = {});

/// Objective values of explicit representations, used by search and by
/// certificate re-verification. `left` is (|X|-1) x N (free-space
/// coordinates), `right` is dim E x N.
double rep_value(CrossNorm kind, const LipBall& ball, const FinNormedSpace& factor,
                 const Matrix& left, const Matrix& right, Exponent p);

/// Molecule representation: pairs p_i with multiplicity s_i > 0 and vectors
/// E_i, standing for the limit of representations using s_i copies of
/// delta_(p_i) [x] E_i / s_i. Canonical matrix sum_i molecule(p_i) E_i^T.
struct MoleculeRep {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  Vector multiplicity;
  Matrix vectors;  // dim E x N
};

Matrix molecule_rep_matrix(const PointedMetricSpace& X, const MoleculeRep& rep);
/// Value of the mu_p (kind Mu) or cs_p (kind Cs) objective.
double molecule_rep_value(CrossNorm kind, const LipBall& ball, const FinNormedSpace& factor,
                          const MoleculeRep& rep, Exponent p);

}  // namespace lipnorm
