#include <benchmark/benchmark.h>

#include "entropic/neural.hpp"

using namespace entropic;

namespace {

Mat random_batch(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat x(rows, cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.0, 1.0);
  return x;
}

void BM_DenseForward(benchmark::State& state) {
  Rng rng(0);
  const int hidden = static_cast<int>(state.range(0));
  const int batch = static_cast<int>(state.range(1));
  const auto net = DenseNet::random({4, hidden, hidden, 2}, rng);
  const Mat x = random_batch(4, batch, rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_DenseForward)->Args({64, 128})->Args({256, 256});

void BM_DenseForwardBackward(benchmark::State& state) {
  Rng rng(1);
  const int hidden = static_cast<int>(state.range(0));
  const int batch = static_cast<int>(state.range(1));
  const auto net = DenseNet::random({4, hidden, hidden, 2}, rng);
  const Mat x = random_batch(4, batch, rng);
  const Mat g = random_batch(2, batch, rng);
  DenseNet::Cache cache;
  for (auto _ : state) {
    net.forward(x, cache);
    benchmark::DoNotOptimize(net.backward(cache, g));
  }
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_DenseForwardBackward)->Args({64, 128})->Args({256, 256});

void BM_AdamStep(benchmark::State& state) {
  Rng rng(2);
  auto net = DenseNet::random({4, 256, 256, 2}, rng);
  AdamState adam(net.n_params(), 3e-4);
  const Vec g = Vec::Constant(net.n_params(), 1e-3);
  for (auto _ : state) adam_step(adam, net.mutable_params(), g);
}
BENCHMARK(BM_AdamStep);

}  // namespace
