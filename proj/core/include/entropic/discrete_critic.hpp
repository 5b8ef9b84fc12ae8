#pragma once

#include <string>
#include <vector>

#include "entropic/envs.hpp"
#include "entropic/metrics.hpp"
#include "entropic/neural.hpp"
#include "entropic/replay_buffer.hpp"
#include "entropic/stable_critic.hpp"

namespace entropic {

/// How the discrete critic represents and learns its values.
///  - Stabilized: network outputs Q_psi with Z = e^{Q_psi}, normalised clipped gradient.
///  - Unstable: network outputs Z directly, plain squared exponential TD gradient.
///  - RiskNeutral: ordinary TD on Q (the DQN baseline).
enum class CriticMode { Stabilized, Unstable, RiskNeutral };

CriticMode parse_critic_mode(const std::string& name);
std::string to_string(CriticMode mode);

/// CartPole critic training defaults (10k warmup, 1k-step epochs, gamma 0.99, tau 0.005,
/// 10k buffer, two hidden layers of 128, AdamW at 3e-4, epsilon 0.1).
struct DiscreteCriticConfig {
  CriticMode mode = CriticMode::Stabilized;
  double beta = 1.0;
  long steps = 50000;
  long warmup = 10000;
  long epoch = 1000;
  double gamma = 0.99;
  double tau = 0.005;
  std::size_t buffer = 10000;
  std::vector<int> hidden{128, 128};
  double lr = 3e-4;
  double weight_decay = 0.01;
  double epsilon = 0.1;
  std::size_t batch = 256;
  int eval_episodes = 20;
  double clip_c = kDefaultExpClip;

  void validate() const;
};

/// Bounds seen over every stabilised batch of a run.
struct StabilityStats {
  long batches = 0;
  double max_abs_f = 0.0;
  double max_abs_clipped = 0.0;
  double max_abs_coeff = 0.0;
  bool params_finite = true;
};

struct DiscreteCriticResult {
  /// Columns: eval_return_mean, eval_return_std, init_value_mean, grad_norm_log10.
  MetricsLog log;
  DenseNet net;
  StabilityStats stats;
  /// Report of the last stabilised batch (empty in the other modes).
  StabilizedGradReport last_report;
};

/// Columns of the per-epoch log.
const std::vector<std::string>& critic_log_columns();

/// Targets for a sampled batch from the target network:
///  - Stabilized: beta r + gamma ext_a Q'(s', a), ext = max for beta > 0 and min for beta < 0; beta r at done.
///  - Unstable: e^{beta r} ext_a Z'(s', a) with the same ext; e^{beta r} at done.
///  - RiskNeutral: r + gamma max_a Q'(s', a); r at done.
Vec discrete_targets(CriticMode mode, const DenseNet& target, const Batch& batch, double beta, double gamma);

/// Greedy action on one output row: argmax when the mode's ordering agrees with Q, argmin
/// when beta < 0 flips it. Lowest index wins ties; a non-finite row yields action 0.
int discrete_greedy(CriticMode mode, const Vec& outputs, double beta);

/// Value estimate in reward units for a state's output row: (1/beta) ext Q_psi when
/// stabilised, the raw ext Z when unstable, max Q when risk-neutral.
double discrete_value_estimate(CriticMode mode, const Vec& outputs, double beta);

DiscreteCriticResult train_discrete_critic(const CartPole& env, const DiscreteCriticConfig& config, Rng& rng);

}  // namespace entropic
