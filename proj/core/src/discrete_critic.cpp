#include "entropic/discrete_critic.hpp"

#include <cmath>
#include <limits>

#include "entropic/errors.hpp"

namespace entropic {

CriticMode parse_critic_mode(const std::string& name) {
  if (name == "stabilized") return CriticMode::Stabilized;
  if (name == "unstable") return CriticMode::Unstable;
  if (name == "risk-neutral") return CriticMode::RiskNeutral;
  throw ValidationError("unknown critic mode '" + name + "' (expected stabilized, unstable or risk-neutral)");
}

std::string to_string(CriticMode mode) {
  switch (mode) {
    case CriticMode::Stabilized: return "stabilized";
    case CriticMode::Unstable: return "unstable";
    case CriticMode::RiskNeutral: return "risk-neutral";
  }
  return "unknown";
}

void DiscreteCriticConfig::validate() const {
  if (mode != CriticMode::RiskNeutral && RiskParameter(beta).risk_neutral())
    throw ValidationError("risk-sensitive critic modes need |beta| above the floor");
  if (steps < 1 || warmup < 0 || epoch < 1) throw ValidationError("steps and epoch must be positive, warmup non-negative");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ValidationError("gamma must lie in (0, 1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ValidationError("tau must lie in [0, 1]");
  if (buffer == 0 || batch == 0) throw ValidationError("buffer and batch sizes must be positive");
  if (!(lr > 0.0) || weight_decay < 0.0) throw ValidationError("learning rate must be positive, weight decay non-negative");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in [0, 1]");
  if (eval_episodes < 1) throw ValidationError("eval_episodes must be positive");
  if (!(clip_c > 0.0)) throw ValidationError("clip_c must be positive");
  for (int h : hidden)
    if (h < 1) throw ValidationError("hidden layer sizes must be positive");
}

const std::vector<std::string>& critic_log_columns() {
  static const std::vector<std::string> cols{"eval_return_mean", "eval_return_std", "init_value_mean",
                                             "grad_norm_log10"};
  return cols;
}

namespace {

// Whether larger network outputs mean larger Q for this mode.
bool ascending(CriticMode mode, double beta) { return mode == CriticMode::RiskNeutral || beta > 0.0; }

double extreme(CriticMode mode, const Eigen::Ref<const Vec>& v, double beta) {
  return ascending(mode, beta) ? v.maxCoeff() : v.minCoeff();
}

}  // namespace

Vec discrete_targets(CriticMode mode, const DenseNet& target, const Batch& batch, double beta, double gamma) {
  const Mat next = target.forward(batch.next_states);
  Vec y(batch.size());
  for (Eigen::Index i = 0; i < batch.size(); ++i) {
    const bool done = batch.done(i) > 0.5;
    const double r = batch.rewards(i);
    const double cont = done ? 0.0 : extreme(mode, next.col(i), beta);
    switch (mode) {
      case CriticMode::Stabilized: y(i) = beta * r + gamma * cont; break;
      case CriticMode::Unstable: y(i) = std::exp(beta * r) * (done ? 1.0 : cont); break;
      case CriticMode::RiskNeutral: y(i) = r + gamma * cont; break;
    }
  }
  return y;
}

int discrete_greedy(CriticMode mode, const Vec& outputs, double beta) {
  if (!outputs.allFinite()) return 0;
  const bool up = ascending(mode, beta);
  Eigen::Index best = 0;
  for (Eigen::Index a = 1; a < outputs.size(); ++a)
    if (up ? outputs(a) > outputs(best) : outputs(a) < outputs(best)) best = a;
  return static_cast<int>(best);
}

double discrete_value_estimate(CriticMode mode, const Vec& outputs, double beta) {
  const double e = extreme(mode, outputs, beta);
  return mode == CriticMode::Stabilized ? e / beta : e;
}

namespace {

struct Evaluation {
  double mean = 0.0;
  double std = 0.0;
  double init_value = 0.0;
};

Evaluation evaluate(const CartPole& env, const DenseNet& net, const DiscreteCriticConfig& cfg, Rng& rng) {
  std::vector<double> returns;
  double init_sum = 0.0;
  for (int ep = 0; ep < cfg.eval_episodes; ++ep) {
    Vec s = env.reset(rng);
    const Vec out0 = net.forward_one(s);
    init_sum += discrete_value_estimate(cfg.mode, out0, cfg.beta);
    double ret = 0.0;
    for (int t = 0; t < env.max_episode_steps(); ++t) {
      const int a = discrete_greedy(cfg.mode, t == 0 ? out0 : net.forward_one(s), cfg.beta);
      const auto step = env.step(s, a, rng);
      ret += step.reward;
      s = step.state;
      if (step.done) break;
    }
    returns.push_back(ret);
  }
  Evaluation e;
  for (double r : returns) e.mean += r;
  e.mean /= static_cast<double>(returns.size());
  for (double r : returns) e.std += (r - e.mean) * (r - e.mean);
  e.std = std::sqrt(e.std / static_cast<double>(returns.size()));
  e.init_value = init_sum / cfg.eval_episodes;
  return e;
}

}  // namespace

DiscreteCriticResult train_discrete_critic(const CartPole& env, const DiscreteCriticConfig& cfg, Rng& rng) {
  cfg.validate();
  std::vector<int> sizes{static_cast<int>(env.state_dim())};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(CartPole::kActions);

  DiscreteCriticResult res{MetricsLog(critic_log_columns()), DenseNet::random(sizes, rng), {}, {}};
  DenseNet& net = res.net;
  DenseNet target = net;
  AdamState opt(net.n_params(), cfg.lr, cfg.weight_decay);
  ReplayBuffer buffer(cfg.buffer, env.state_dim(), 1);
  Rng eval_rng = rng.split();

  Vec s = env.reset(rng);
  int episode_t = 0;
  double log_norm_sum = 0.0;
  long updates_in_epoch = 0;
  for (long t = 1; t <= cfg.steps; ++t) {
    int a = 0;
    if (t <= cfg.warmup || rng.uniform() < cfg.epsilon)
      a = static_cast<int>(rng.index(CartPole::kActions));
    else
      a = discrete_greedy(cfg.mode, net.forward_one(s), cfg.beta);
    const auto step = env.step(s, a, rng);
    buffer.add(s, Vec::Constant(1, a), step.reward, step.state, step.done);
    ++episode_t;
    if (step.done || episode_t >= env.max_episode_steps()) {
      s = env.reset(rng);
      episode_t = 0;
    } else {
      s = step.state;
    }

    if (t > cfg.warmup) {
      const Batch batch = buffer.sample(cfg.batch, rng);
      std::vector<Eigen::Index> rows(static_cast<std::size_t>(batch.size()));
      for (Eigen::Index i = 0; i < batch.size(); ++i)
        rows[static_cast<std::size_t>(i)] = static_cast<Eigen::Index>(batch.actions(0, i));
      const Vec y = discrete_targets(cfg.mode, target, batch, cfg.beta, cfg.gamma);
      Vec grad;
      if (cfg.mode == CriticMode::Stabilized) {
        try {
          res.last_report = stabilized_critic_grad(net, batch.states, rows, y, cfg.beta, cfg.clip_c);
        } catch (const NumericalError& e) {
          res.stats.params_finite = net.all_finite();
          res.log.abort(t, e.what());
          return res;
        }
        auto& st = res.stats;
        ++st.batches;
        st.max_abs_f = std::max(st.max_abs_f, res.last_report.f.cwiseAbs().maxCoeff());
        st.max_abs_clipped = std::max(st.max_abs_clipped, res.last_report.clipped.cwiseAbs().maxCoeff());
        st.max_abs_coeff = std::max(st.max_abs_coeff, res.last_report.coeff.cwiseAbs().maxCoeff());
        grad = res.last_report.grad;
      } else if (cfg.mode == CriticMode::Unstable) {
        grad = unstable_z_grad(net, batch.states, rows, y).grad;
      } else {
        grad = risk_neutral_td_grad(net, batch.states, rows, y).grad;
      }
      log_norm_sum += std::log10(grad.norm());
      ++updates_in_epoch;
      adam_step(opt, net.mutable_params(), grad);
      soft_update(target, net, cfg.tau);
      if (!net.all_finite()) {
        res.stats.params_finite = false;
        res.log.abort(t, "critic parameters became non-finite");
        return res;
      }
    }

    if (t % cfg.epoch == 0) {
      const auto ev = evaluate(env, net, cfg, eval_rng);
      const double norm = updates_in_epoch > 0 ? log_norm_sum / static_cast<double>(updates_in_epoch)
                                               : std::numeric_limits<double>::quiet_NaN();
      res.log.add(t, {ev.mean, ev.std, ev.init_value, norm});
      log_norm_sum = 0.0;
      updates_in_epoch = 0;
    }
  }
  return res;
}

}  // namespace entropic
