#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "entropic/envs.hpp"
#include "entropic/errors.hpp"
#include "support/env_rollout.hpp"

using namespace entropic;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

struct PathOutcome {
  double ret = 0.0;
  int steps = 0;
  int risky_steps = 0;
  bool reached = false;
};

// Follow waypoints at unit speed, then head for the goal.
PathOutcome follow(const RiskyPointMass& env, std::vector<Vec> waypoints, Rng& rng) {
  waypoints.push_back(vec({env.spec().goal_x, env.spec().goal_y}));
  Vec s = env.reset(rng);
  PathOutcome out;
  std::size_t w = 0;
  for (int t = 0; t < env.max_episode_steps(); ++t) {
    while (w + 1 < waypoints.size() && (waypoints[w] - s).norm() < 0.05) ++w;
    const Vec dir = (waypoints[w] - s).normalized();
    const auto step = env.step(s, dir, rng);
    out.ret += step.reward;
    out.risky_steps += step.risky;
    ++out.steps;
    s = step.state;
    if (step.done) {
      out.reached = true;
      break;
    }
  }
  return out;
}

}  // namespace

TEST(CartPole, FirstStepMatchesClosedForm) {
  CartPole cp;
  Rng rng(0);
  const auto out = cp.step(Vec::Zero(4), 1, rng);
  const double theta_acc = -(10.0 / 1.1) / (0.5 * (4.0 / 3.0 - 0.1 / 1.1));
  const double x_acc = 10.0 / 1.1 - 0.05 * theta_acc / 1.1;
  EXPECT_DOUBLE_EQ(out.state(0), 0.0);
  EXPECT_NEAR(out.state(1), 0.02 * x_acc, 1e-15);
  EXPECT_DOUBLE_EQ(out.state(2), 0.0);
  EXPECT_NEAR(out.state(3), 0.02 * theta_acc, 1e-15);
  EXPECT_EQ(out.reward, 1.0);
  EXPECT_FALSE(out.done);
}

TEST(CartPole, MirrorSymmetry) {
  CartPole cp;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    Vec s(4);
    for (Eigen::Index j = 0; j < 4; ++j) s(j) = rng.uniform(-0.2, 0.2);
    const int a = static_cast<int>(rng.index(2));
    const auto fwd = cp.step(s, a, rng);
    const auto mir = cp.step(-s, 1 - a, rng);
    EXPECT_TRUE(mir.state.isApprox(-fwd.state, 1e-15)) << i;
    EXPECT_EQ(mir.done, fwd.done);
  }
}

TEST(CartPole, UnforcedPoleFallsWithinCap) {
  CartPoleParams p;
  Vec s = vec({0.0, 0.0, 0.01, 0.0});
  int t = 0;
  while (!cartpole_failed(p, s) && t < p.max_steps) {
    s = cartpole_dynamics(p, s, 0.0);
    ++t;
  }
  EXPECT_LT(t, p.max_steps);
  EXPECT_GT(s(2), p.theta_threshold);
}

TEST(CartPole, RewardIsOneUntilFailure) {
  CartPole cp;
  Rng rng(2);
  Vec s = cp.reset(rng);
  int t = 0;
  for (; t < cp.max_episode_steps(); ++t) {
    const auto out = cp.step(s, 0, rng);
    EXPECT_EQ(out.reward, 1.0);
    s = out.state;
    if (out.done) break;
  }
  EXPECT_LT(t, cp.max_episode_steps());
  EXPECT_THROW(cp.step(s, 2, rng), ValidationError);
}

TEST(CartPole, ResetWithinBounds) {
  CartPole cp;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) EXPECT_LE(cp.reset(rng).cwiseAbs().maxCoeff(), 0.05);
}

TEST(RiskyPendulum, NoNoiseLeftOfThreshold) {
  RiskyPendulum env;
  Rng rng(4);
  const Vec s = vec({-0.5, 0.0, 0.0, 0.0});
  for (int i = 0; i < 1000; ++i) {
    const auto out = env.step(s, vec({rng.uniform(-1, 1)}), rng);
    EXPECT_FALSE(out.risky);
    EXPECT_EQ(out.reward, 1.0);
  }
}

TEST(RiskyPendulum, NoiseVarianceRightOfThreshold) {
  RiskyPendulum env(1.0);
  Rng rng(5);
  const Vec s = vec({0.5, 0.0, 0.0, 0.0});
  const int n = 10000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto out = env.step(s, vec({0.0}), rng);
    ASSERT_TRUE(out.risky);
    sum += out.reward;
    sq += out.reward * out.reward;
  }
  const double mean = sum / n;
  const double var = (sq - n * mean * mean) / (n - 1);
  EXPECT_NEAR(mean, 1.0, 4.0 / std::sqrt(n));
  // Standard deviation of the sample variance of N(0, 1) is sqrt(2 / (n - 1)).
  EXPECT_NEAR(var, 1.0, 4.0 * std::sqrt(2.0 / (n - 1)));
}

TEST(RiskyPendulum, InfiniteThresholdMatchesNoiselessDynamics) {
  RiskyPendulum env(1.0, std::numeric_limits<double>::infinity());
  CartPoleParams p;
  Rng rng(6), probe(6);
  Vec s = env.reset(rng);
  probe.uniform();
  probe.uniform();
  probe.uniform();
  probe.uniform();
  for (int t = 0; t < 50; ++t) {
    const double a = std::sin(0.3 * t);
    const auto out = env.step(s, vec({a}), rng);
    EXPECT_TRUE(out.state == cartpole_dynamics(p, s, a * p.force_mag));
    EXPECT_EQ(out.reward, 1.0);
    s = out.state;
  }
  EXPECT_EQ(rng.counter(), probe.counter());
}

TEST(RiskyPendulum, RiskyFlagMatchesNoiseActivation) {
  RiskyPendulum env;
  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Vec s = vec({rng.uniform(-0.05, 0.07), rng.uniform(-0.5, 0.5), rng.uniform(-0.1, 0.1), 0.0});
    const auto out = env.step(s, vec({rng.uniform(-1, 1)}), rng);
    EXPECT_EQ(out.risky, out.state(0) > 0.01);
    EXPECT_EQ(out.risky, out.reward != 1.0);
  }
}

TEST(RiskyPendulum, ActionsAreClamped) {
  RiskyPendulum env;
  Rng rng(8);
  const Vec s = vec({-0.5, 0.0, 0.0, 0.0});
  EXPECT_TRUE(env.step(s, vec({5.0}), rng).state == env.step(s, vec({1.0}), rng).state);
  EXPECT_THROW(env.step(s, vec({std::nan("")}), rng), DomainError);
  EXPECT_THROW(env.step(s, vec({0.0, 0.0}), rng), ValidationError);
}

TEST(RiskyPointMass, StraightPathIsFasterButRisky) {
  RiskyPointMass env;
  Rng rng(9);
  const auto straight = follow(env, {}, rng);
  const auto detour = follow(env, {vec({0.4, 0.8}), vec({1.6, 0.8})}, rng);
  EXPECT_TRUE(straight.reached);
  EXPECT_TRUE(detour.reached);
  EXPECT_EQ(straight.steps, 19);
  EXPECT_GT(detour.steps, straight.steps);
  // The rectangle is 1.0 wide and each step covers 0.1; the edges hit within rounding.
  EXPECT_GE(straight.risky_steps, 10);
  EXPECT_LE(straight.risky_steps, 11);
  EXPECT_EQ(detour.risky_steps, 0);
}

TEST(RiskyPointMass, NoiselessOptimumGoesThrough) {
  PointMassSpec spec;
  spec.noise_sigma = 0.0;
  RiskyPointMass env(spec);
  Rng rng(10);
  const auto straight = follow(env, {}, rng);
  const auto detour = follow(env, {vec({0.4, 0.8}), vec({1.6, 0.8})}, rng);
  const auto low = follow(env, {vec({0.4, -0.8}), vec({1.6, -0.8})}, rng);
  EXPECT_GT(straight.ret, detour.ret);
  EXPECT_NEAR(detour.ret, low.ret, 1e-9);
}

TEST(RiskyPointMass, VelocityIsRescaledToUnitNorm) {
  RiskyPointMass env;
  Rng rng(11);
  const auto out = env.step(Vec::Zero(2), vec({1.0, 1.0}), rng);
  EXPECT_NEAR(out.state.norm(), 0.1, 1e-15);
  const auto slow = env.step(Vec::Zero(2), vec({0.3, -0.4}), rng);
  EXPECT_TRUE(slow.state.isApprox(vec({0.03, -0.04}), 1e-15));
  const auto clamped = env.step(vec({3.0, 0.0}), vec({1.0, 0.0}), rng);
  EXPECT_DOUBLE_EQ(clamped.state(0), 3.0);
}

TEST(RiskyPointMass, InvalidSpecRejected) {
  PointMassSpec spec;
  spec.region_x_hi = spec.region_x_lo;
  EXPECT_THROW(RiskyPointMass{spec}, ValidationError);
  spec = PointMassSpec{};
  spec.dt = 0.0;
  EXPECT_THROW(RiskyPointMass{spec}, ValidationError);
}

TEST(RiskyBandit, ClosedFormPreference) {
  RiskyBandit equal(1.0, 1.0, 2.0);
  EXPECT_TRUE(equal.prefers_risky(1.0));
  EXPECT_FALSE(equal.prefers_risky(-1.0));
  EXPECT_DOUBLE_EQ(equal.risky_value(1.0), 3.0);
  EXPECT_DOUBLE_EQ(equal.risky_value(-1.0), -1.0);
  // Risky wins iff beta > 2 (safe - mean) / sigma^2 = 0.25.
  RiskyBandit lower(1.0, 0.5, 2.0);
  EXPECT_FALSE(lower.prefers_risky(0.2));
  EXPECT_TRUE(lower.prefers_risky(0.3));
  EXPECT_FALSE(lower.prefers_risky(1e-9));
  RiskyBandit certain(1.0, 1.5, 0.0);
  for (double beta : {-10.0, -1.0, 1.0, 10.0}) EXPECT_TRUE(certain.prefers_risky(beta));
}

TEST(RiskyBandit, ArmsAndMoments) {
  RiskyBandit env(1.0, 1.0, 2.0);
  Rng rng(12);
  const Vec s = env.reset(rng);
  const auto safe = env.step(s, vec({-1e-12}), rng);
  EXPECT_EQ(safe.reward, 1.0);
  EXPECT_FALSE(safe.risky);
  EXPECT_TRUE(safe.done);
  const int n = 10000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto out = env.step(s, vec({0.0}), rng);
    ASSERT_TRUE(out.risky);
    sum += out.reward;
    sq += out.reward * out.reward;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 1.0, 4.0 * 2.0 / std::sqrt(n));
  EXPECT_NEAR((sq - n * mean * mean) / (n - 1), 4.0, 4.0 * 4.0 * std::sqrt(2.0 / (n - 1)));
}

TEST(EnvFactory, NamesAndErrors) {
  EXPECT_EQ(make_continuous_env("pendulum-risky")->name(), "pendulum-risky");
  EXPECT_EQ(make_continuous_env("pointmass-risky")->action_dim(), 2);
  EXPECT_EQ(make_continuous_env("bandit-risky")->max_episode_steps(), 1);
  EXPECT_THROW(make_continuous_env("swimmer"), ValidationError);
}

TEST(EnvGolden, TrajectoriesMatchFixtures) {
  for (const auto& env : fixtures::golden_envs()) {
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
      const auto path = std::string(ENTROPIC_FIXTURE_DIR) + "/" + fixtures::golden_file_name(env, seed);
      std::ifstream in(path);
      ASSERT_TRUE(in) << path;
      const auto rows = fixtures::golden_rollout(env, seed);
      std::string line;
      std::getline(in, line);
      for (std::size_t t = 0; t < rows.size(); ++t) {
        ASSERT_TRUE(std::getline(in, line)) << path << " ends early";
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(std::stod(cell));
        std::vector<double> expect{static_cast<double>(t)};
        expect.insert(expect.end(), rows[t].state.begin(), rows[t].state.end());
        expect.insert(expect.end(), rows[t].action.begin(), rows[t].action.end());
        expect.push_back(rows[t].reward);
        expect.push_back(rows[t].done);
        expect.push_back(rows[t].risky);
        ASSERT_EQ(cells.size(), expect.size()) << path << " row " << t;
        for (std::size_t i = 0; i < cells.size(); ++i)
          EXPECT_NEAR(cells[i], expect[i], 1e-12 * std::max(1.0, std::abs(expect[i]))) << path << " row " << t;
      }
      EXPECT_FALSE(std::getline(in, line)) << path << " has extra rows";
    }
  }
}
