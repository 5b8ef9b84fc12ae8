#include <benchmark/benchmark.h>

#include "entropic/enumerate.hpp"
#include "entropic/exp_q_learning.hpp"
#include "entropic/gridworld.hpp"
#include "entropic/policy_gradients.hpp"
#include "entropic/random_instances.hpp"
#include "entropic/soft_values.hpp"

using namespace entropic;

namespace {

void BM_SoftValueDpDiscounted(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(0);
  const auto mdp = random_tabular_mdp(rng, n, 4, 3, 0.9);
  const auto policy = StochasticTabularPolicy::softmax(random_logits(rng, n, 4));
  for (auto _ : state)
    benchmark::DoNotOptimize(soft_value_dp(mdp, policy, RiskParameter(0.5), BackupMode::Discounted));
}
BENCHMARK(BM_SoftValueDpDiscounted)->Arg(10)->Arg(100);

void BM_EnumerateObjective(benchmark::State& state) {
  Rng rng(1);
  const auto mdp = random_tabular_mdp(rng, 5, 3, 3);
  const auto policy = StochasticTabularPolicy::softmax(random_logits(rng, 5, 3));
  for (auto _ : state) benchmark::DoNotOptimize(entropic_risk_enumerate(mdp, policy, RiskParameter(-0.5)));
}
BENCHMARK(BM_EnumerateObjective);

void BM_StochasticPgThm1(benchmark::State& state) {
  Rng rng(2);
  const auto mdp = random_tabular_mdp(rng, 5, 3, 3);
  const Mat logits = random_logits(rng, 5, 3);
  for (auto _ : state) benchmark::DoNotOptimize(stochastic_pg_thm1(mdp, logits, RiskParameter(-0.5)));
}
BENCHMARK(BM_StochasticPgThm1);

void BM_GridworldExpQLearning(benchmark::State& state) {
  const CliffGridWorld grid{GridWorldSpec{}};
  ExpQConfig cfg;
  cfg.episodes = static_cast<int>(state.range(0));
  for (auto _ : state) {
    Rng rng(3);
    benchmark::DoNotOptimize(exp_q_learning(grid.mdp(), cfg, rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GridworldExpQLearning)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
