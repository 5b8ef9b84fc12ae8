#include "entropic/rseac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entropic/errors.hpp"

namespace entropic {

void RsEacConfig::validate() const {
  if (RiskParameter(beta).risk_neutral()) throw ValidationError("rsEAC needs |beta| above the risk-neutral floor");
  if (steps < 1 || warmup < 0 || epoch < 1) throw ValidationError("steps and epoch must be positive, warmup non-negative");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in [0, 1]");
  if (!(lr > 0.0)) throw ValidationError("learning rate must be positive");
  if (exploration_noise < 0.0 || policy_noise < 0.0 || noise_clip < 0.0)
    throw ValidationError("noise scales must be non-negative");
  if (policy_delay < 1) throw ValidationError("policy delay must be at least 1");
  if (buffer == 0 || batch == 0) throw ValidationError("buffer and batch sizes must be positive");
  if (eval_episodes < 1) throw ValidationError("eval_episodes must be positive");
  if (!(clip_c > 0.0)) throw ValidationError("clip_c must be positive");
  for (const auto* layers : {&actor_hidden, &critic_hidden})
    for (int h : *layers)
      if (h < 1) throw ValidationError("hidden layer sizes must be positive");
}

namespace {

std::vector<int> layer_sizes(Eigen::Index in, const std::vector<int>& hidden, Eigen::Index out) {
  std::vector<int> sizes{static_cast<int>(in)};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(static_cast<int>(out));
  return sizes;
}

Mat squash(const Mat& u, double low, double high) {
  const double mid = 0.5 * (low + high), half = 0.5 * (high - low);
  return (u.array().tanh() * half + mid).matrix();
}

Mat clamp_to(const Mat& a, double low, double high) { return a.cwiseMax(low).cwiseMin(high); }

}  // namespace

RsEacAgent RsEacAgent::create(Eigen::Index state_dim, Eigen::Index action_dim, double action_low, double action_high,
                              const std::vector<int>& actor_hidden, const std::vector<int>& critic_hidden,
                              double beta, Rng& rng) {
  if (!(action_low < action_high)) throw ValidationError("action bounds must satisfy low < high");
  auto actor = DenseNet::random(layer_sizes(state_dim, actor_hidden, action_dim), rng);
  auto c1 = DenseNet::random(layer_sizes(state_dim + action_dim, critic_hidden, 1), rng);
  auto c2 = DenseNet::random(layer_sizes(state_dim + action_dim, critic_hidden, 1), rng);
  return {actor, c1, c2, actor, c1, c2, beta, action_low, action_high};
}

Mat RsEacAgent::act(const Mat& states) const { return squash(actor.forward(states), action_low, action_high); }

Mat RsEacAgent::act_target(const Mat& states) const {
  return squash(actor_target.forward(states), action_low, action_high);
}

Vec RsEacAgent::act_one(const Vec& state) const { return act(Mat(state)).col(0); }

Mat critic_input(const Mat& states, const Mat& actions) {
  if (states.cols() != actions.cols()) throw ValidationError("states and actions differ in batch size");
  Mat x(states.rows() + actions.rows(), states.cols());
  x << states, actions;
  return x;
}

Mat clipped_noise(Eigen::Index rows, Eigen::Index cols, double sigma, double clip, Rng& rng) {
  Mat n(rows, cols);
  for (Eigen::Index i = 0; i < n.size(); ++i) n(i) = std::clamp(rng.normal(0.0, sigma), -clip, clip);
  return n;
}

Vec twin_target(const Vec& rewards, const Vec& done, const Vec& q1_next, const Vec& q2_next, double beta,
                double gamma) {
  const auto n = rewards.size();
  if (done.size() != n || q1_next.size() != n || q2_next.size() != n)
    throw ValidationError("twin target inputs differ in length");
  Vec y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double next = beta > 0.0 ? std::min(q1_next(i), q2_next(i)) : std::max(q1_next(i), q2_next(i));
    y(i) = beta * rewards(i) + (done(i) > 0.5 ? 0.0 : gamma * next);
  }
  return y;
}

Vec critic_target(const RsEacAgent& agent, const Batch& batch, double gamma, double policy_noise, double noise_clip,
                  Rng& rng) {
  const double half = 0.5 * (agent.action_high - agent.action_low);
  const Mat eps = half * clipped_noise(agent.action_dim(), batch.size(), policy_noise, noise_clip, rng);
  const Mat next_a = clamp_to(agent.act_target(batch.next_states) + eps, agent.action_low, agent.action_high);
  const Mat x = critic_input(batch.next_states, next_a);
  const Vec q1 = agent.critic1_target.forward(x).row(0).transpose();
  const Vec q2 = agent.critic2_target.forward(x).row(0).transpose();
  return twin_target(batch.rewards, batch.done, q1, q2, agent.beta, gamma);
}

Vec actor_grad(const RsEacAgent& agent, const Mat& states) {
  if (RiskParameter(agent.beta).risk_neutral()) throw DomainError("actor gradient needs |beta| above the floor");
  if (states.cols() == 0) throw ValidationError("actor gradient needs a non-empty batch");
  const double half = 0.5 * (agent.action_high - agent.action_low);
  DenseNet::Cache actor_cache;
  const Mat u = agent.actor.forward(states, actor_cache);
  const Mat a = squash(u, agent.action_low, agent.action_high);

  DenseNet::Cache critic_cache;
  agent.critic1.forward(critic_input(states, a), critic_cache);
  const Mat dq = agent.critic1.backward(critic_cache, Mat::Ones(1, states.cols())).input;
  const Mat dq_da = dq.bottomRows(agent.action_dim());

  const double scale = 1.0 / (agent.beta * static_cast<double>(states.cols()));
  const Mat th = u.array().tanh();
  const Mat du = (dq_da.array() * half * (1.0 - th.array().square()) * scale).matrix();
  return agent.actor.backward(actor_cache, du).params;
}

const std::vector<std::string>& rseac_log_columns() {
  static const std::vector<std::string> cols{"eval_return_mean", "eval_return_std", "risky_visit_rate",
                                             "critic_grad_norm_log10", "actor_grad_norm_log10"};
  return cols;
}

RsEacEvaluation evaluate_actor(const ContinuousEnv& env, const RsEacAgent& agent, int episodes, Rng& rng) {
  if (episodes < 1) throw ValidationError("evaluation needs at least one episode");
  std::vector<double> returns;
  long steps = 0, risky = 0;
  for (int ep = 0; ep < episodes; ++ep) {
    Vec s = env.reset(rng);
    double ret = 0.0;
    for (int t = 0; t < env.max_episode_steps(); ++t) {
      const auto step = env.step(s, agent.act_one(s), rng);
      ret += step.reward;
      ++steps;
      if (step.risky) ++risky;
      s = step.state;
      if (step.done) break;
    }
    returns.push_back(ret);
  }
  RsEacEvaluation e;
  for (double r : returns) e.return_mean += r;
  e.return_mean /= static_cast<double>(returns.size());
  for (double r : returns) e.return_std += (r - e.return_mean) * (r - e.return_mean);
  e.return_std = std::sqrt(e.return_std / static_cast<double>(returns.size()));
  e.risky_visit_rate = static_cast<double>(risky) / static_cast<double>(steps);
  return e;
}

namespace {

void track(RsEacStats& st, const StabilizedGradReport& r) {
  ++st.critic_updates;
  st.max_abs_f = std::max(st.max_abs_f, r.f.cwiseAbs().maxCoeff());
  st.max_abs_clipped = std::max(st.max_abs_clipped, r.clipped.cwiseAbs().maxCoeff());
  st.max_abs_coeff = std::max(st.max_abs_coeff, r.coeff.cwiseAbs().maxCoeff());
}

double epoch_mean(double sum, long n) {
  return n > 0 ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

RsEacResult train_rseac(const ContinuousEnv& env, const RsEacConfig& cfg, Rng& rng) {
  cfg.validate();
  const double low = env.action_low(), high = env.action_high();
  const double half = 0.5 * (high - low);
  RsEacResult res{MetricsLog(rseac_log_columns()),
                  RsEacAgent::create(env.state_dim(), env.action_dim(), low, high, cfg.actor_hidden,
                                     cfg.critic_hidden, cfg.beta, rng),
                  {}};
  RsEacAgent& ag = res.agent;
  AdamState actor_opt(ag.actor.n_params(), cfg.lr, 0.0);
  AdamState c1_opt(ag.critic1.n_params(), cfg.lr, 0.0);
  AdamState c2_opt(ag.critic2.n_params(), cfg.lr, 0.0);
  ReplayBuffer buffer(cfg.buffer, env.state_dim(), env.action_dim());
  Rng eval_rng = rng.split();
  const std::vector<Eigen::Index> rows(cfg.batch, 0);

  Vec s = env.reset(rng);
  int episode_t = 0;
  double critic_log_sum = 0.0, actor_log_sum = 0.0;
  long critic_n = 0, actor_n = 0;
  for (long t = 1; t <= cfg.steps; ++t) {
    Vec a(env.action_dim());
    if (t <= cfg.warmup) {
      for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = rng.uniform(low, high);
    } else {
      a = ag.act_one(s);
      for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = std::clamp(a(i) + half * cfg.exploration_noise * rng.normal(), low, high);
    }
    const auto step = env.step(s, a, rng);
    buffer.add(s, a, step.reward, step.state, step.done);
    ++episode_t;
    if (step.done || episode_t >= env.max_episode_steps()) {
      s = env.reset(rng);
      episode_t = 0;
    } else {
      s = step.state;
    }

    if (t > cfg.warmup) {
      const Batch batch = buffer.sample(cfg.batch, rng);
      const Vec y = critic_target(ag, batch, cfg.gamma, cfg.policy_noise, cfg.noise_clip, rng);
      const Mat x = critic_input(batch.states, batch.actions);
      StabilizedGradReport r1, r2;
      try {
        r1 = stabilized_critic_grad(ag.critic1, x, rows, y, cfg.beta, cfg.clip_c);
        r2 = stabilized_critic_grad(ag.critic2, x, rows, y, cfg.beta, cfg.clip_c);
      } catch (const NumericalError& e) {
        res.log.abort(t, e.what());
        return res;
      }
      track(res.stats, r1);
      track(res.stats, r2);
      critic_log_sum += std::log10(r1.grad.norm());
      ++critic_n;
      adam_step(c1_opt, ag.critic1.mutable_params(), r1.grad);
      adam_step(c2_opt, ag.critic2.mutable_params(), r2.grad);

      if ((t - cfg.warmup) % cfg.policy_delay == 0) {
        const Vec g = actor_grad(ag, batch.states);
        actor_log_sum += std::log10(g.norm());
        ++actor_n;
        ++res.stats.actor_updates;
        adam_step(actor_opt, ag.actor.mutable_params(), -g);
        soft_update(ag.actor_target, ag.actor, cfg.tau);
        soft_update(ag.critic1_target, ag.critic1, cfg.tau);
        soft_update(ag.critic2_target, ag.critic2, cfg.tau);
      }
      if (!ag.actor.all_finite() || !ag.critic1.all_finite() || !ag.critic2.all_finite()) {
        res.stats.params_finite = false;
        res.log.abort(t, "rsEAC parameters became non-finite");
        return res;
      }
    }

    if (t % cfg.epoch == 0) {
      const auto ev = evaluate_actor(env, ag, cfg.eval_episodes, eval_rng);
      res.log.add(t, {ev.return_mean, ev.return_std, ev.risky_visit_rate, epoch_mean(critic_log_sum, critic_n),
                      epoch_mean(actor_log_sum, actor_n)});
      critic_log_sum = actor_log_sum = 0.0;
      critic_n = actor_n = 0;
    }
  }
  return res;
}

}  // namespace entropic
