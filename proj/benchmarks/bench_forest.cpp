#include <benchmark/benchmark.h>

#include <cmath>

#include "ddml/forest.hpp"
#include "ddml/rng.hpp"

using namespace ddml;

namespace {
void make_data(int n, Matrix& x, Vector& y) {
  SeededRng rng(3);
  x.resize(n, 8);
  y.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < 8; ++j) x(i, j) = rng.normal();
    y[i] = std::sin(x(i, 0)) + 0.5 * x(i, 1) * x(i, 2) + 0.1 * rng.normal();
  }
}
}  // namespace

static void ForestFit(benchmark::State& state) {
  Matrix x;
  Vector y;
  make_data(static_cast<int>(state.range(0)), x, y);
  nuisance::ForestConfig cfg;
  cfg.trees = 50;
  for (auto _ : state) {
    SeededRng rng(11);
    auto forest = nuisance::RandomForest::fit(x, y, cfg, rng);
    benchmark::DoNotOptimize(forest.trees().size());
  }
}
BENCHMARK(ForestFit)->Arg(500)->Arg(2000);

static void ForestPredict(benchmark::State& state) {
  Matrix x;
  Vector y;
  make_data(2000, x, y);
  nuisance::ForestConfig cfg;
  cfg.trees = 50;
  SeededRng rng(11);
  const auto forest = nuisance::RandomForest::fit(x, y, cfg, rng);
  for (auto _ : state) {
    auto pred = forest.predict(x);
    benchmark::DoNotOptimize(pred[0]);
  }
  state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(ForestPredict);
