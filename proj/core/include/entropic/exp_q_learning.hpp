#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "entropic/gridworld.hpp"
#include "entropic/mdp.hpp"
#include "entropic/rng.hpp"

namespace entropic {

/// Z(s, a) = exp(beta Q(s, a)) learned by exponential Q-learning.
struct ExpQTable {
  Mat z;
  double beta = 0.0;
  Eigen::MatrixXi visits;
  /// Set when an update would have written a non-finite or zero entry; the table stops changing.
  bool frozen = false;
  std::string diagnostic;

  /// (1/beta) log Z.
  Mat q() const;
  /// log Z per state along the greedy action, i.e. beta V.
  Vec log_z_greedy() const;
  /// Largest |log Z| over all entries.
  double max_abs_log_z() const;
};

/// argmax_a Q(s, a): argmax Z for beta > 0, argmin Z for beta < 0, lowest index on ties.
/// Throws NumericalError on a non-finite or non-positive row.
std::size_t greedy_action(const Eigen::Ref<const Eigen::RowVectorXd>& z_row, double beta);
std::size_t greedy_action(const ExpQTable& table, std::size_t s);
std::vector<std::size_t> greedy_policy(const ExpQTable& table);

struct ExpQConfig {
  double beta = -1.0;
  double epsilon = 0.1;
  int episodes = 50000;
  double step_size = 0.1;
  int max_episode_steps = 1000;
};

struct EpisodeRecord {
  int episode = 0;
  double undiscounted_return = 0.0;
  int length = 0;
  std::size_t final_state = 0;
  bool terminated = false;
};

struct ExpQResult {
  ExpQTable table;
  std::vector<EpisodeRecord> episodes;
  /// Episode index at which the table froze, if it did.
  std::optional<int> frozen_at;
};

/// Tabular exponential Q-learning with epsilon-greedy exploration:
/// Z(s,a) <- (1 - alpha) Z(s,a) + alpha e^{beta r} Zg(s')^gamma, where Zg is the greedy entry of
/// the successor row and the target is e^{beta r} when s' is terminal. The discount comes from
/// the MDP. Z starts at 1.
ExpQResult exp_q_learning(const TabularMDP& mdp, const ExpQConfig& config, Rng& rng);

struct RiskProfile {
  // Monte Carlo over greedy rollouts capped at max_steps.
  int rollouts = 0;
  double goal_rate = 0.0;
  double cliff_rate = 0.0;
  double mean_path_length = 0.0;
  // Exact distribution propagation under the same cap.
  double exact_goal_rate = 0.0;
  double exact_cliff_rate = 0.0;
  double exact_mean_path_length = 0.0;
  // Uncapped absorption from the linear solve (I - M_TT) x = b.
  double absorption_goal = 0.0;
  double absorption_cliff = 0.0;
  double expected_absorption_steps = 0.0;
};

/// Evaluate a deterministic gridworld policy from the start cell. Path length counts moves until
/// a cliff or goal cell is entered.
RiskProfile policy_risk_profile(const CliffGridWorld& grid, const std::vector<std::size_t>& policy, int rollouts,
                                Rng& rng, int max_steps = 1000);
RiskProfile policy_risk_profile(const CliffGridWorld& grid, const ExpQTable& table, int rollouts, Rng& rng,
                                int max_steps = 1000);

/// Expected number of visits to each state before a cliff or goal cell is entered, starting
/// from the start cell (exact, by linear solve). Absorbing cells get the probability of entry.
Vec expected_visits(const CliffGridWorld& grid, const std::vector<std::size_t>& policy);

/// Greedy trajectory of cells from the start, sampled with rng, until a cliff or goal cell or max_steps.
std::vector<Cell> greedy_trajectory(const CliffGridWorld& grid, const std::vector<std::size_t>& policy, Rng& rng,
                                    int max_steps = 1000);

}  // namespace entropic
