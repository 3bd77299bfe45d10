#include <benchmark/benchmark.h>

#include <random>

#include "padtree/analysis.hpp"
#include "padtree/boundary_law.hpp"
#include "padtree/measure.hpp"

using namespace padtree;

namespace {

ContextPtr ctx3() {
  static ContextPtr ctx = PAdicContext::make(3, 64);
  return ctx;
}

PAdicNumber random_unit(std::mt19937_64& rng, const ContextPtr& ctx) {
  std::uniform_int_distribution<unsigned long> d(0, ctx->p() - 1);
  mpz_class v = 1 + d(rng) % (ctx->p() - 1);
  mpz_class step = ctx->p();
  for (int i = 1; i < 64; ++i) {
    v += d(rng) * step;
    step *= ctx->p();
  }
  return PAdicNumber::from_mpz(v, ctx);
}

// Satisfies the uniqueness conditions at p = 3: exact unit column sums,
// rows constant mod 3, residues summing to 1.
InteractionMatrix bench_matrix(const ContextPtr& ctx) {
  return matrix_from_rationals(
      {{4, 1, 7}, {-3, 3, -6}, {0, -3, 0}}, ctx);
}

void BM_Mul(benchmark::State& state) {
  std::mt19937_64 rng(1);
  ContextPtr ctx = ctx3();
  PAdicNumber a = random_unit(rng, ctx);
  PAdicNumber b = random_unit(rng, ctx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(a * b);
  }
}
BENCHMARK(BM_Mul);

void BM_Div(benchmark::State& state) {
  std::mt19937_64 rng(2);
  ContextPtr ctx = ctx3();
  PAdicNumber a = random_unit(rng, ctx);
  PAdicNumber b = random_unit(rng, ctx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(a / b);
  }
}
BENCHMARK(BM_Div);

void BM_Sqrt13(benchmark::State& state) {
  ContextPtr ctx = ctx3();
  PAdicNumber thirteen = PAdicNumber::from_integer(13, ctx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sqrt(thirteen));
  }
}
BENCHMARK(BM_Sqrt13);

void BM_ExpLogRoundTrip(benchmark::State& state) {
  ContextPtr ctx = ctx3();
  PAdicNumber x = PAdicNumber::from_integer(12, ctx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_p(exp_p(x)));
  }
}
BENCHMARK(BM_ExpLogRoundTrip);

void BM_HenselQuadratic(benchmark::State& state) {
  ContextPtr ctx = ctx3();
  PAdicNumber alpha = PAdicNumber::from_integer(6, ctx);
  PAdicNumber beta = PAdicNumber::from_integer(19, ctx);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_translation_invariant(2, alpha, beta));
  }
}
BENCHMARK(BM_HenselQuadratic);

void BM_IterateMap(benchmark::State& state) {
  ContextPtr ctx = ctx3();
  TreeGraph tree = build_cayley({2, 4, 0});
  EdgeMatrixField field = EdgeMatrixField::homogeneous(bench_matrix(ctx));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> s(0, 26);
  BoundaryLawField z;
  z.ctx = ctx;
  z.q = 3;
  for (const DirectedEdge& e : tree.directed_edges()) {
    PVec vec;
    for (int i = 0; i < 2; ++i) {
      vec.push_back(PAdicNumber::from_integer(1 + 3 * s(rng), ctx));
    }
    z.values[e] = vec;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(iterate_map(z, field, tree));
  }
}
BENCHMARK(BM_IterateMap)->Unit(benchmark::kMillisecond);

void BM_SolveUnique(benchmark::State& state) {
  ContextPtr ctx = ctx3();
  TreeGraph tree = build_cayley({2, 3, 0});
  EdgeMatrixField field = EdgeMatrixField::homogeneous(bench_matrix(ctx));
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<long> s(0, 26);
  BoundaryLawField z0;
  z0.ctx = ctx;
  z0.q = 3;
  for (const DirectedEdge& e : tree.directed_edges()) {
    PVec vec;
    for (int i = 0; i < 2; ++i) {
      vec.push_back(PAdicNumber::from_integer(1 + 3 * s(rng), ctx));
    }
    z0.values[e] = vec;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_unique(field, tree, z0, 80));
  }
}
BENCHMARK(BM_SolveUnique)->Unit(benchmark::kMillisecond);

void BM_PartitionFunction(benchmark::State& state) {
  ContextPtr ctx = ctx3();
  TreeGraph tree = build_cayley({2, 2, 0});
  EdgeMatrixField field = EdgeMatrixField::homogeneous(bench_matrix(ctx));
  BoundaryLawField ones = BoundaryLawField::all_ones(ctx, 3, tree);
  Volume lambda(tree, {0});
  for (auto _ : state) {
    benchmark::DoNotOptimize(partition_function(ones, field, tree, lambda));
  }
}
BENCHMARK(BM_PartitionFunction)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
