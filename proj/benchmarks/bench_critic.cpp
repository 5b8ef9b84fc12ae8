#include <benchmark/benchmark.h>

#include <vector>

#include "entropic/rseac.hpp"
#include "entropic/stable_critic.hpp"

using namespace entropic;

namespace {

void BM_FHelper(benchmark::State& state) {
  Rng rng(0);
  std::vector<double> xs(1024), ys(1024);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = rng.uniform(-30.0, 30.0);
    ys[i] = rng.uniform(-30.0, 30.0);
  }
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += f_helper(xs[i], ys[i]);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(xs.size()));
}
BENCHMARK(BM_FHelper);

void BM_StabilizedCriticGrad(benchmark::State& state) {
  Rng rng(1);
  const int batch = static_cast<int>(state.range(0));
  const auto net = DenseNet::random({4, 64, 64, 2}, rng);
  Mat x(4, batch);
  Vec y(batch);
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(batch));
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = rng.uniform(-1.0, 1.0);
  for (int j = 0; j < batch; ++j) {
    y(j) = rng.uniform(-2.0, 2.0);
    rows[static_cast<std::size_t>(j)] = static_cast<Eigen::Index>(rng.index(2));
  }
  for (auto _ : state) benchmark::DoNotOptimize(stabilized_critic_grad(net, x, rows, y, 1.0));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_StabilizedCriticGrad)->Arg(128)->Arg(256);

void BM_RsEacActorGrad(benchmark::State& state) {
  Rng rng(2);
  const auto agent = RsEacAgent::create(2, 2, -1.0, 1.0, {64, 64}, {64, 64}, -1.0, rng);
  Mat s(2, 128);
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = rng.uniform(-3.0, 3.0);
  for (auto _ : state) benchmark::DoNotOptimize(actor_grad(agent, s));
}
BENCHMARK(BM_RsEacActorGrad);

}  // namespace
