#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "entropic/errors.hpp"
#include "entropic/rseac.hpp"

using namespace entropic;

namespace {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Mat uniform_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double lo, double hi) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.uniform(lo, hi);
  return m;
}

// State-independent actor u = theta and a critic linear in the action, Q_psi(s, a) = w . a.
RsEacAgent linear_agent(double theta, const Vec& w, double beta) {
  Rng rng(0);
  auto ag = RsEacAgent::create(1, w.size(), -1.0, 1.0, {}, {}, beta, rng);
  ag.actor.weight(0).setZero();
  ag.actor.bias(0).setConstant(theta);
  ag.critic1.weight(0).setZero();
  ag.critic1.weight(0).rightCols(w.size()) = w.transpose();
  ag.critic1.bias(0).setZero();
  return ag;
}

RsEacConfig tiny_config(double beta) {
  RsEacConfig c;
  c.beta = beta;
  c.steps = 600;
  c.warmup = 200;
  c.epoch = 200;
  c.batch = 16;
  c.buffer = 1000;
  c.actor_hidden = {8};
  c.critic_hidden = {8};
  c.eval_episodes = 2;
  return c;
}

}  // namespace

TEST(RsEac, TwinTargetUsesPessimisticTwin) {
  const Vec r = vec({1.0, 1.0, 1.0}), done = vec({0.0, 0.0, 1.0});
  const Vec q1 = vec({2.0, 4.0, 2.0}), q2 = vec({3.0, 4.0, 3.0});
  const Vec pos = twin_target(r, done, q1, q2, 0.5, 0.9);
  EXPECT_DOUBLE_EQ(pos(0), 0.5 + 0.9 * 2.0);
  EXPECT_DOUBLE_EQ(pos(1), 0.5 + 0.9 * 4.0);
  EXPECT_DOUBLE_EQ(pos(2), 0.5);
  const Vec neg = twin_target(r, done, q1, q2, -0.5, 0.9);
  EXPECT_DOUBLE_EQ(neg(0), -0.5 + 0.9 * 3.0);
  EXPECT_DOUBLE_EQ(neg(1), -0.5 + 0.9 * 4.0);
  EXPECT_DOUBLE_EQ(neg(2), -0.5);
  EXPECT_THROW(twin_target(r, done, q1, vec({1.0}), 1.0, 0.9), ValidationError);
}

TEST(RsEac, ActorGradLinearCriticClosedForm) {
  const Vec w = vec({0.7, -1.3});
  Mat s(1, 4);
  s << -1.0, 0.5, 2.0, 3.5;
  for (double beta : {2.0, -0.5}) {
    const Vec g = actor_grad(linear_agent(0.0, w, beta), s);
    // Layout: weight (2 x 1) then bias (2); tanh'(0) = 1.
    EXPECT_NEAR(g(2), w(0) / beta, 1e-15);
    EXPECT_NEAR(g(3), w(1) / beta, 1e-15);
    EXPECT_NEAR(g(0), w(0) / beta * s.mean(), 1e-15);
    EXPECT_NEAR(g(1), w(1) / beta * s.mean(), 1e-15);
  }
  const double theta = 0.8, sech2 = 1.0 - std::tanh(theta) * std::tanh(theta);
  const Vec g = actor_grad(linear_agent(theta, w, 1.0), s);
  EXPECT_NEAR(g(2), w(0) * sech2, 1e-15);
}

TEST(RsEac, ActorGradFlipsWithBetaAndVanishesOnFlatCritic) {
  const Vec w = vec({0.4});
  Mat s(1, 3);
  s << 0.1, 0.2, 0.3;
  EXPECT_EQ(actor_grad(linear_agent(0.3, w, 1.5), s), -actor_grad(linear_agent(0.3, w, -1.5), s));
  EXPECT_TRUE(actor_grad(linear_agent(0.3, vec({0.0}), 1.0), s).isZero(0.0));
  EXPECT_THROW(actor_grad(linear_agent(0.3, w, 0.0), s), DomainError);
}

TEST(RsEac, ActorGradMatchesFiniteDifferences) {
  Rng rng(17);
  for (double beta : {1.0, -0.3}) {
    auto ag = RsEacAgent::create(3, 2, -2.0, 3.0, {10}, {12, 9}, beta, rng);
    const Mat s = uniform_matrix(rng, 3, 7, -1, 1);
    const Vec g = actor_grad(ag, s);
    const auto objective = [&](const RsEacAgent& a) {
      return a.critic1.forward(critic_input(s, a.act(s))).mean() / beta;
    };
    const Vec p0 = ag.actor.params();
    Vec fd(p0.size());
    const double h = 1e-6;
    for (Eigen::Index k = 0; k < p0.size(); ++k) {
      Vec p = p0;
      p(k) += h;
      ag.actor.set_params(p);
      const double up = objective(ag);
      p(k) = p0(k) - h;
      ag.actor.set_params(p);
      fd(k) = (up - objective(ag)) / (2 * h);
    }
    ag.actor.set_params(p0);
    EXPECT_LE((g - fd).norm() / fd.norm(), 1e-6) << "beta " << beta;
  }
}

TEST(RsEac, ActionsStayWithinBounds) {
  Rng rng(2);
  auto ag = RsEacAgent::create(2, 3, -0.5, 2.0, {6}, {6}, 1.0, rng);
  ag.actor.mutable_params() *= 50.0;
  const Mat a = ag.act(uniform_matrix(rng, 2, 200, -10, 10));
  EXPECT_GE(a.minCoeff(), -0.5);
  EXPECT_LE(a.maxCoeff(), 2.0);
  EXPECT_THROW(RsEacAgent::create(2, 1, 1.0, 1.0, {}, {}, 1.0, rng), ValidationError);
}

TEST(RsEac, NoiseRespectsClipExactly) {
  Rng rng(5);
  const Mat n = clipped_noise(3, 20000, 0.2, 0.5, rng);
  EXPECT_EQ(n.maxCoeff(), 0.5);
  EXPECT_EQ(n.minCoeff(), -0.5);
  EXPECT_NEAR(n.mean(), 0.0, 0.01);
  EXPECT_TRUE(clipped_noise(2, 5, 0.0, 0.5, rng).isZero(0.0));
}

TEST(RsEac, NoiselessTargetUsesTargetActor) {
  Rng rng(9);
  auto ag = RsEacAgent::create(2, 1, -1.0, 1.0, {5}, {5}, -1.0, rng);
  ag.actor.mutable_params().setRandom();
  Batch b{Mat::Zero(2, 4), Mat::Zero(1, 4), vec({1, 2, 3, 4}), uniform_matrix(rng, 2, 4, -1, 1), vec({0, 1, 0, 0})};
  const Vec y = critic_target(ag, b, 0.9, 0.0, 0.5, rng);
  const Mat x = critic_input(b.next_states, ag.act_target(b.next_states));
  const Vec q1 = ag.critic1_target.forward(x).row(0).transpose();
  const Vec q2 = ag.critic2_target.forward(x).row(0).transpose();
  EXPECT_EQ(y, twin_target(b.rewards, b.done, q1, q2, -1.0, 0.9));
}

TEST(RsEac, EvaluationCountsRiskySteps) {
  RiskyBandit env;
  Rng rng(1);
  auto ag = RsEacAgent::create(1, 1, -1.0, 1.0, {}, {}, 1.0, rng);
  ag.actor.weight(0).setZero();
  ag.actor.bias(0).setConstant(2.0);
  EXPECT_EQ(evaluate_actor(env, ag, 50, rng).risky_visit_rate, 1.0);
  ag.actor.bias(0).setConstant(-2.0);
  const auto safe = evaluate_actor(env, ag, 50, rng);
  EXPECT_EQ(safe.risky_visit_rate, 0.0);
  EXPECT_EQ(safe.return_mean, env.safe_reward());
  EXPECT_EQ(safe.return_std, 0.0);
}

TEST(RsEac, ConfigValidation) {
  RsEacConfig c;
  EXPECT_NO_THROW(c.validate());
  c.beta = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.policy_delay = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.critic_hidden = {-1};
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(RsEac, ShortRunStaysBoundedAndLogs) {
  RiskyPointMass env;
  Rng rng(3);
  const auto res = train_rseac(env, tiny_config(-1.0), rng);
  ASSERT_FALSE(res.log.aborted()) << res.log.abort_reason();
  ASSERT_EQ(res.log.size(), 3u);
  EXPECT_EQ(res.stats.critic_updates, 2 * 400);
  EXPECT_EQ(res.stats.actor_updates, 200);
  EXPECT_LE(res.stats.max_abs_f, 1.0);
  EXPECT_LE(res.stats.max_abs_clipped, kDefaultExpClip);
  EXPECT_TRUE(res.stats.params_finite);
  for (double v : res.log.column("risky_visit_rate")) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_TRUE(std::isnan(res.log.column("actor_grad_norm_log10")[0]));
  EXPECT_TRUE(std::isfinite(res.log.column("critic_grad_norm_log10").back()));
}

TEST(RsEac, SameSeedBitIdenticalLog) {
  RiskyPendulum env;
  Rng a(12), b(12);
  const auto ra = train_rseac(env, tiny_config(1.0), a);
  const auto rb = train_rseac(env, tiny_config(1.0), b);
  ASSERT_EQ(ra.log.size(), rb.log.size());
  for (std::size_t i = 0; i < ra.log.size(); ++i)
    for (std::size_t j = 0; j < ra.log.columns().size(); ++j) {
      const double x = ra.log.records()[i].values[j], y = rb.log.records()[i].values[j];
      EXPECT_TRUE(x == y || (std::isnan(x) && std::isnan(y)));
    }
  EXPECT_EQ(ra.agent.actor.params(), rb.agent.actor.params());
  EXPECT_EQ(ra.agent.critic2_target.params(), rb.agent.critic2_target.params());
}
