#pragma once

#include <vector>

#include "lipnorm/estimate.hpp"
#include "lipnorm/lipmap.hpp"
#include "lipnorm/optim.hpp"
#include "lipnorm/pietsch.hpp"
#include "lipnorm/tensor.hpp"

namespace lipnorm {

struct SummingOptions {
  unsigned long long seed = kDefaultSeed;
  /// Seeded restarts of the sequence search behind lower bounds.
  int restarts = 64;
  int threads = 1;
  pietsch::CuttingPlaneOptions cutting_plane;
  /// Extra dual-ball points (domain-dual coordinates, dual norm <= 1) added
  /// to the Pietsch candidate set.
  std::vector<Vector> extra_functionals;
  /// Random tensors used to test the pairing inequality for strictly
  /// Lipschitz p-summing maps.
  int pairing_samples = 4;
  TensorOptions tensor{kDefaultSeed, 8, 4, 1};
};

/// Operator norm. Exact for F(X), l_1 and l_inf domains (vertex
/// enumeration) and for l_2 -> l_2 (spectral norm).
NormEstimate op_norm(const LinearOperator& u);

/// p-summing norm, p in [1, inf). Exact tier: p = 2 into a Euclidean
/// codomain (Pietsch cutting plane). Other cases give a searched lower bound
/// and a factorization or nuclear upper bound flagged loose.
NormEstimate pi_norm(const LinearOperator& u, Exponent p, const SummingOptions& options = {});

/// Pi_p^SL(T) = Pi_p(T^). The bracket is that of pi_norm; the lower side
/// may be raised by the pairing witness built from the tensor estimator.
NormEstimate strictly_lip_p_summing_norm(const LipschitzMap& T, Exponent p,
                                         const SummingOptions& options = {});

/// Lipschitz p-summing norm, p in (1, inf), via Pietsch domination over
/// the Lipschitz-ball vertices (an LP, exact up to solver tolerance) capped
/// by the strictly-summing upper bound.
NormEstimate lip_p_summing_norm(const LipschitzMap& T, Exponent p,
                                const SummingOptions& options = {});

/// Strongly p-summing norm, p in (1, inf): the p-summing norm of the
/// adjoint. Exact tier: p = 2 into l_2 with a polyhedral domain ball.
NormEstimate strongly_p_summing_norm(const LinearOperator& u, Exponent p,
                                     const SummingOptions& options = {});

/// D_p^L(T) = D_p(T^).
NormEstimate lip_cohen_strongly_p_summing_norm(const LipschitzMap& T, Exponent p,
                                               const SummingOptions& options = {});

/// (sum ||u x_i||^p)^(1/p) / weak_p((x_i)) for a sequence in domain
/// coordinates (columns). The weak norm is exact where available and an
/// upper bound otherwise, so the ratio is always a valid lower bound.
double sequence_ratio(const LinearOperator& u, const Matrix& sequence, Exponent p);

/// Pairing form of the strict Lipschitz p-summing inequality:
/// u = sum_k y_k [x] g_k with g_k norming T^ y_k, so that
/// <T, u> = sum ||T^ y_k||^p, compared against the d_p estimate of u.
struct PairingWitness {
  TensorElement tensor;
  double pairing = 0.0;
  NormEstimate dp;
  /// pairing / dp.upper: a lower bound for Pi_p^SL(T).
  double ratio = 0.0;
};

/// Requires a normed codomain. `sequence` holds F(X) coordinates.
PairingWitness sl_pairing_witness(const LipschitzMap& T, Exponent p, const Matrix& sequence,
                                  const TensorOptions& options = {});

/// (sum ||u* z_i||_{D*}^p)^(1/p) / weak_p((z_i)) for a sequence in the
/// codomain dual: the adjoint counterpart of sequence_ratio.
double adjoint_sequence_ratio(const LinearOperator& u, const Matrix& sequence, Exponent p);

/// Extreme points of the domain unit ball, one per +/- pair: normalized
/// molecules for F(X), +/- e_j for l_1, sign vectors for l_inf. Throws
/// InputError for other domains.
Matrix domain_extreme_points(const LinearOperator& u);

/// Norm of a functional on the domain (Lipschitz constant for F(X)).
double domain_dual_norm(const LinearOperator& u, const Vector& f);

/// ||id : l_2^k -> G||, used by factorization bounds for p-summing norms.
double euclidean_to(const Codomain& G);

/// ||id : G* -> l_2^k||, the same for the adjoint.
double dual_to_euclidean(const Codomain& G);

/// Sequence stored in a sequence_witness certificate.
Matrix witness_sequence(const NormEstimate& e, Eigen::Index dim);

}  // namespace lipnorm
