#include <benchmark/benchmark.h>

#include "ddml/hsic.hpp"
#include "ddml/rng.hpp"

using namespace ddml;

namespace {
Matrix block(int n, int d, std::uint64_t seed) {
  SeededRng rng(seed);
  Matrix m(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  return m;
}
}  // namespace

static void GramMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix x = block(n, 16, 7);
  hsic::KernelSpec spec;  // median heuristic included
  for (auto _ : state) {
    auto k = hsic::gram_matrix(x, spec);
    benchmark::DoNotOptimize(k(0, 1));
  }
  state.SetComplexityN(n);
}
BENCHMARK(GramMatrix)->Arg(256)->Arg(512)->Arg(1024)->Complexity();

static void HsicValue(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = block(n, 16, 7);
  const Matrix b = block(n, 16, 8);
  hsic::KernelSpec spec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(hsic::hsic_value(a, b, spec));
  }
}
BENCHMARK(HsicValue)->Arg(256)->Arg(1024);

static void HsicWithGrad(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = block(n, 16, 7);
  const Matrix b = block(n, 16, 8);
  hsic::KernelSpec spec;
  for (auto _ : state) {
    auto res = hsic::hsic_with_grad(a, b, spec);
    benchmark::DoNotOptimize(res.da(0, 0));
  }
}
BENCHMARK(HsicWithGrad)->Arg(256)->Arg(1024);
