#pragma once

#include <string>
#include <vector>

#include "entropic/envs.hpp"
#include "entropic/metrics.hpp"
#include "entropic/neural.hpp"
#include "entropic/replay_buffer.hpp"
#include "entropic/stable_critic.hpp"

namespace entropic {

/// rsEAC training settings. Defaults follow the continuous-control table (Adam at 3e-4,
/// tau 0.005, policy noise 0.2 clipped at 0.5, delay 2, 5000 warmup steps, exponent clip 5,
/// two hidden layers of 256, buffer 10^6).
struct RsEacConfig {
  double beta = 1.0;
  long steps = 100000;
  long warmup = 5000;
  long epoch = 1000;
  double gamma = 0.99;
  double tau = 0.005;
  double lr = 3e-4;
  /// Behaviour noise standard deviation, in units of half the action range.
  double exploration_noise = 0.1;
  /// Target smoothing noise standard deviation and clip, same units.
  double policy_noise = 0.2;
  double noise_clip = 0.5;
  int policy_delay = 2;
  std::size_t buffer = 1000000;
  std::size_t batch = 256;
  std::vector<int> actor_hidden{256, 256};
  std::vector<int> critic_hidden{256, 256};
  int eval_episodes = 20;
  double clip_c = kDefaultExpClip;

  void validate() const;
};

/// Deterministic actor, twin log-domain critics Q_psi = beta Q and their target copies.
///
/// The actor network emits an unbounded u per action dimension; the action is
/// mid + half tanh(u) so it always lies inside [low, high]. Critics read [state; action].
struct RsEacAgent {
  DenseNet actor;
  DenseNet critic1;
  DenseNet critic2;
  DenseNet actor_target;
  DenseNet critic1_target;
  DenseNet critic2_target;
  double beta = 1.0;
  double action_low = -1.0;
  double action_high = 1.0;

  /// Random online networks with targets copied from them.
  static RsEacAgent create(Eigen::Index state_dim, Eigen::Index action_dim, double action_low, double action_high,
                           const std::vector<int>& actor_hidden, const std::vector<int>& critic_hidden, double beta,
                           Rng& rng);

  Eigen::Index state_dim() const { return actor.input_size(); }
  Eigen::Index action_dim() const { return actor.output_size(); }

  /// Noiseless actions, one column per state column.
  Mat act(const Mat& states) const;
  Mat act_target(const Mat& states) const;
  Vec act_one(const Vec& state) const;
};

/// Stacks states over actions column by column.
Mat critic_input(const Mat& states, const Mat& actions);

/// Gaussian noise with the given standard deviation, each coordinate clipped to [-clip, clip].
Mat clipped_noise(Eigen::Index rows, Eigen::Index cols, double sigma, double clip, Rng& rng);

/// beta r + gamma ext_j Q'_j(s', a') with ext = min for beta > 0 and max for beta < 0.
/// Uses beta r alone where done is set.
Vec twin_target(const Vec& rewards, const Vec& done, const Vec& q1_next, const Vec& q2_next, double beta,
                double gamma);

/// Target for a sampled batch: smoothed target-actor actions a' = clamp(mu'(s') + eps), then twin_target.
Vec critic_target(const RsEacAgent& agent, const Batch& batch, double gamma, double policy_noise, double noise_clip,
                  Rng& rng);

/// Mean over the batch of (1/beta) grad_theta mu(s) grad_a Q_psi1(s, a) at a = mu(s).
/// The ascent direction of the actor objective, in the flat actor parameter layout.
/// Throws DomainError when |beta| is below the risk-neutral floor.
Vec actor_grad(const RsEacAgent& agent, const Mat& states);

struct RsEacStats {
  long critic_updates = 0;
  long actor_updates = 0;
  double max_abs_f = 0.0;
  double max_abs_clipped = 0.0;
  double max_abs_coeff = 0.0;
  bool params_finite = true;
};

struct RsEacResult {
  /// Columns: eval_return_mean, eval_return_std, risky_visit_rate, critic_grad_norm_log10,
  /// actor_grad_norm_log10.
  MetricsLog log;
  RsEacAgent agent;
  RsEacStats stats;
};

const std::vector<std::string>& rseac_log_columns();

struct RsEacEvaluation {
  double return_mean = 0.0;
  double return_std = 0.0;
  /// Fraction of evaluation steps whose resulting state is risky.
  double risky_visit_rate = 0.0;
};

/// Noiseless rollouts of the actor.
RsEacEvaluation evaluate_actor(const ContinuousEnv& env, const RsEacAgent& agent, int episodes, Rng& rng);

RsEacResult train_rseac(const ContinuousEnv& env, const RsEacConfig& config, Rng& rng);

}  // namespace entropic
