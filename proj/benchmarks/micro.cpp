#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "ktb/linalg.hpp"
#include "ktb/pareto.hpp"
#include "ktb/rng.hpp"
#include "ktb/sampling.hpp"

using namespace ktb;

namespace {

Matrix random_matrix(Index r, Index c, Rng& rng) {
  Matrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  }
  return m;
}

SymMatrix random_spd(Index n, Rng& rng) {
  const Matrix a = random_matrix(n, n, rng);
  Matrix s = a * a.transpose() / double(n) + 0.1 * Matrix::Identity(n, n);
  s = 0.5 * (s + s.transpose());
  return SymMatrix(s);
}

KronOperator cube_operator(Index d) {
  Rng rng(7);
  return KronOperator({random_spd(d, rng), random_spd(d, rng), random_spd(d, rng)});
}

void BM_KronMvm(benchmark::State& state) {
  const Index d = state.range(0);
  const KronOperator op = cube_operator(d);
  Rng rng(8);
  const Vector v = rng.normal_vector(op.total_dim());
  for (auto _ : state) benchmark::DoNotOptimize(kron_mvm(op, v));
  state.SetComplexityN(op.total_dim());
}
BENCHMARK(BM_KronMvm)->Arg(8)->Arg(16)->Arg(32)->Complexity();

// Dense reference at sizes where the full matrix still fits comfortably.
void BM_DenseMvm(benchmark::State& state) {
  const KronOperator op = cube_operator(state.range(0));
  const Matrix dense = op.to_dense();
  Rng rng(8);
  const Vector v = rng.normal_vector(op.total_dim());
  for (auto _ : state) benchmark::DoNotOptimize(Vector(dense * v));
}
BENCHMARK(BM_DenseMvm)->Arg(8)->Arg(16);

void BM_ReducedPrecisionMvm(benchmark::State& state) {
  const KronOperator op = cube_operator(state.range(0));
  std::vector<Matrix> fs;
  for (const auto& f : op.factors()) fs.push_back(f.matrix());
  const HalfKronFactors half = quantize_factors(fs);
  Rng rng(9);
  const Vector v = rng.normal_vector(op.total_dim());
  for (auto _ : state) benchmark::DoNotOptimize(reduced_precision_apply(half, v));
}
BENCHMARK(BM_ReducedPrecisionMvm)->Arg(8)->Arg(16)->Arg(32);

void BM_KronEigSolve(benchmark::State& state) {
  const KronOperator op = cube_operator(state.range(0));
  Rng rng(10);
  const Vector v = rng.normal_vector(op.total_dim());
  for (auto _ : state) benchmark::DoNotOptimize(kron_eig_solve(op, 0.01, v));
}
BENCHMARK(BM_KronEigSolve)->Arg(8)->Arg(16);

HogpModel sampling_model(Index n, const Shape& out) {
  Rng rng(11);
  Matrix x(n, 3);
  for (Index i = 0; i < n; ++i) x.row(i) << rng.uniform(), rng.uniform(), rng.uniform();
  Shape joint{n};
  joint.insert(joint.end(), out.begin(), out.end());
  LatentFeatures lat;
  for (Index d : out) lat.modes.push_back(random_matrix(d, 2, rng));
  return HogpModel(x, Tensor(joint, rng.normal_vector(shape_size(joint))), {Vector::Constant(3, 0.4), 1.0}, lat,
                   0.01);
}

void BM_Matheron(benchmark::State& state) {
  const HogpModel model = sampling_model(24, {11, 16, 16});
  Rng rng(12);
  Matrix xt(state.range(0), 3);
  for (Index i = 0; i < xt.rows(); ++i) xt.row(i) << rng.uniform(), rng.uniform(), rng.uniform();
  const auto precision = state.range(1) ? Precision::mixed16 : Precision::full64;
  const SampleRequest req{xt, 4, 64, precision, 13};
  for (auto _ : state) benchmark::DoNotOptimize(batched_matheron_sample(model, req));
  state.SetItemsProcessed(state.iterations() * req.n_samples);
  state.SetLabel(state.range(1) ? "mixed16" : "full64");
}
BENCHMARK(BM_Matheron)->Args({64, 0})->Args({64, 1})->Args({256, 1})->Unit(benchmark::kMillisecond);

Matrix random_front_candidates(Index n) {
  Rng rng(14);
  Matrix p(n, 2);
  for (Index i = 0; i < n; ++i) {
    const double t = rng.uniform();
    p.row(i) << t + 0.1 * rng.uniform(), 1 - t + 0.1 * rng.uniform();
  }
  return p;
}

void BM_Hypervolume2d(benchmark::State& state) {
  const Matrix p = random_front_candidates(state.range(0));
  const Vector ref = Vector::Constant(2, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(hypervolume2d(p, ref));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hypervolume2d)->RangeMultiplier(4)->Range(16, 4096)->Complexity(benchmark::oNLogN);

void BM_HvContributions(benchmark::State& state) {
  const Matrix p = random_front_candidates(state.range(0));
  const auto mask = pareto_filter(p);
  Matrix front(std::count(mask.begin(), mask.end(), true), 2);
  for (Index i = 0, k = 0; i < p.rows(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) front.row(k++) = p.row(i);
  }
  const Vector ref = Vector::Constant(2, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(hv_contributions(front, ref));
}
BENCHMARK(BM_HvContributions)->RangeMultiplier(4)->Range(16, 4096);

}  // namespace

BENCHMARK_MAIN();
