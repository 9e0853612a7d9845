#pragma once

#include <functional>
#include <random>

#include "lipnorm/spaces.hpp"

namespace lipnorm {

/// All randomized searches draw from this engine, seeded explicitly.
using Rng = std::mt19937_64;

inline constexpr unsigned long long kDefaultSeed = 0xC0FFEE;

/// Independent stream `index` derived from `seed` (splitmix64 mixing), so
/// parallel restarts do not depend on scheduling.
Rng make_rng(unsigned long long seed, unsigned long long index = 0);

Vector gaussian_vector(Rng& rng, Eigen::Index n);
Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);

struct NelderMeadOptions {
  int max_evaluations = 4000;
  double initial_step = 0.25;
  double f_tol = 1e-12;  // relative spread of simplex values
  double x_tol = 1e-10;
};

struct NelderMeadResult {
  Vector x;
  double value = 0.0;
  int evaluations = 0;
};

/// Runs body(0..count-1) on up to `threads` worker threads. Callers merge
/// per-index results afterwards, so the outcome does not depend on timing.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

/// Derivative-free local minimization. Non-finite values count as +inf.
NelderMeadResult nelder_mead(const std::function<double(const Vector&)>& f, const Vector& x0,
                             const NelderMeadOptions& options = {});

}  // namespace lipnorm
