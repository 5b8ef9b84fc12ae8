#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "entropic/envs.hpp"

namespace entropic::fixtures {

/// One row per step: state before the step, action, reward, done, risky.
struct RolloutRow {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  bool done = false;
  bool risky = false;
};

/// 100-step rollout under uniform random actions, resetting after done or the step cap.
template <class StepFn, class ResetFn>
std::vector<RolloutRow> scripted_rollout(int steps, int cap, Eigen::Index action_dim, bool discrete, Rng& rng,
                                         ResetFn reset, StepFn step) {
  std::vector<RolloutRow> rows;
  Vec s = reset(rng);
  int t = 0;
  for (int i = 0; i < steps; ++i) {
    Vec a(action_dim);
    for (Eigen::Index j = 0; j < action_dim; ++j)
      a(j) = discrete ? static_cast<double>(rng.index(2)) : rng.uniform(-1.2, 1.2);
    const EnvStep out = step(s, a, rng);
    rows.push_back({std::vector<double>(s.data(), s.data() + s.size()), std::vector<double>(a.data(), a.data() + a.size()),
                    out.reward, out.done, out.risky});
    ++t;
    if (out.done || t >= cap) {
      s = reset(rng);
      t = 0;
    } else {
      s = out.state;
    }
  }
  return rows;
}

inline std::vector<RolloutRow> golden_rollout(const std::string& env, std::uint64_t seed) {
  Rng rng(seed);
  if (env == "cartpole") {
    CartPole cp;
    return scripted_rollout(
        100, cp.max_episode_steps(), 1, true, rng, [&](Rng& r) { return cp.reset(r); },
        [&](const Vec& s, const Vec& a, Rng& r) { return cp.step(s, static_cast<int>(a(0)), r); });
  }
  const auto e = make_continuous_env(env);
  return scripted_rollout(
      100, e->max_episode_steps(), e->action_dim(), false, rng, [&](Rng& r) { return e->reset(r); },
      [&](const Vec& s, const Vec& a, Rng& r) { return e->step(s, a, r); });
}

inline const std::vector<std::string>& golden_envs() {
  static const std::vector<std::string> names{"cartpole", "pendulum-risky", "pointmass-risky", "bandit-risky"};
  return names;
}

inline std::string golden_file_name(const std::string& env, std::uint64_t seed) {
  return "env_" + env + "_seed" + std::to_string(seed) + ".csv";
}

}  // namespace entropic::fixtures
