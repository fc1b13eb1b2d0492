#include <benchmark/benchmark.h>

#include "ddml/net.hpp"
#include "ddml/rng.hpp"

using namespace ddml;

static void ForwardBackward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SeededRng rng(1);
  auto net = num::FeedForwardNet::make({20, 64, 64, 16}, rng);
  Matrix x(n, 20);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 20; ++j) x(i, j) = rng.normal();
  Matrix dout = Matrix::Ones(n, 16);

  for (auto _ : state) {
    auto cache = num::net_forward_cached(net, x);
    auto grads = num::NetGrads::zeros_like(net);
    num::net_backward(net, cache, dout, grads);
    benchmark::DoNotOptimize(grads.dw[0](0, 0));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(ForwardBackward)->Arg(512)->Arg(2048)->Arg(4800);

static void AdamStep(benchmark::State& state) {
  SeededRng rng(1);
  auto net = num::FeedForwardNet::make({20, 64, 64, 16}, rng);
  auto grads = num::NetGrads::zeros_like(net);
  for (auto& g : grads.dw) g.setConstant(1e-3);
  auto adam = num::AdamState::zeros_like(net);
  num::TrainConfig cfg;
  int step = 0;
  for (auto _ : state) {
    num::adam_step(net, grads, adam, cfg, ++step);
    benchmark::DoNotOptimize(net.layers[0].w(0, 0));
  }
}
BENCHMARK(AdamStep);
