#include <benchmark/benchmark.h>

#include "lipnorm/free_space.hpp"
#include "lipnorm/optim.hpp"
#include "lipnorm/random_instances.hpp"
#include "lipnorm/summing.hpp"
#include "lipnorm/tensor.hpp"

using namespace lipnorm;

namespace {

const Exponent kTwo = Exponent::finite(2.0);

void BM_AeNorm(benchmark::State& state) {
  Rng rng = make_rng(1);
  const auto X = instances::random_space(rng, static_cast<int>(state.range(0)));
  const FreeVector m(X, gaussian_vector(rng, X->free_dim()));
  for (auto _ : state) benchmark::DoNotOptimize(ae_norm(m).estimate.upper);
}
BENCHMARK(BM_AeNorm)->DenseRange(4, 12, 4);

void BM_LipBallVertices(benchmark::State& state) {
  const auto X = instances::line_space(static_cast<int>(state.range(0)) - 1);
  for (auto _ : state) benchmark::DoNotOptimize(LipBall(X).count());
}
BENCHMARK(BM_LipBallVertices)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

void BM_OpNormOfLinearization(benchmark::State& state) {
  Rng rng = make_rng(2);
  const auto X = instances::random_space(rng, static_cast<int>(state.range(0)));
  const LinearOperator u = linearize(instances::random_map(rng, X, FinNormedSpace(3, kTwo)));
  for (auto _ : state) benchmark::DoNotOptimize(op_norm(u).upper);
}
BENCHMARK(BM_OpNormOfLinearization)->DenseRange(4, 10, 3);

void BM_PiNorm(benchmark::State& state) {
  Rng rng = make_rng(3);
  const auto X = instances::random_space(rng, static_cast<int>(state.range(0)));
  const LinearOperator u = linearize(instances::random_map(rng, X, FinNormedSpace(2, kTwo)));
  SummingOptions o;
  o.restarts = 8;
  for (auto _ : state) benchmark::DoNotOptimize(pi_norm(u, kTwo, o).upper);
}
BENCHMARK(BM_PiNorm)->DenseRange(3, 5, 1)->Unit(benchmark::kMillisecond);

void BM_MuNorm(benchmark::State& state) {
  Rng rng = make_rng(4);
  const auto X = instances::random_space(rng, 3);
  const TensorElement u = instances::random_tensor(rng, X, FinNormedSpace(2, kTwo), 2);
  TensorOptions o;
  o.restarts = 8;
  for (auto _ : state) benchmark::DoNotOptimize(mu_norm(u, kTwo, o).upper);
}
BENCHMARK(BM_MuNorm)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
