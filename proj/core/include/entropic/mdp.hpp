#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "entropic/rng.hpp"

namespace entropic {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kRowTolerance = 1e-12;
inline constexpr double kDefaultBetaFloor = 1e-6;

/// Which recursion a solver runs: T-step undiscounted, or the discounted fixed point.
enum class BackupMode { FiniteHorizon, Discounted };

/// Risk preference. |beta| below the floor routes solvers to risk-neutral code.
class RiskParameter {
 public:
  explicit RiskParameter(double beta, double floor = kDefaultBetaFloor);

  double beta() const noexcept { return beta_; }
  double floor() const noexcept { return floor_; }
  bool risk_neutral() const noexcept;

 private:
  double beta_;
  double floor_;
};

/// Finite MDP with transition[a](s, s'), reward(s, a), initial distribution and terminal flags.
///
/// Validated on construction and immutable afterwards. Terminal states must
/// self-loop with zero reward.
class TabularMDP {
 public:
  TabularMDP(std::vector<Mat> transition, Mat reward, Vec initial, std::vector<bool> terminal,
             std::optional<int> horizon = std::nullopt, std::optional<double> discount = std::nullopt);

  std::size_t n_states() const noexcept { return static_cast<std::size_t>(reward_.rows()); }
  std::size_t n_actions() const noexcept { return static_cast<std::size_t>(reward_.cols()); }

  /// Row p(. | s, a) as a vector over next states.
  auto transition_row(std::size_t s, std::size_t a) const { return transition_[a].row(static_cast<Eigen::Index>(s)); }
  double transition(std::size_t s, std::size_t a, std::size_t next) const {
    return transition_[a](static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(next));
  }
  /// |S| x |S| matrix for action a.
  const Mat& transition_matrix(std::size_t a) const { return transition_[a]; }
  double reward(std::size_t s, std::size_t a) const {
    return reward_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
  }
  const Mat& reward_table() const noexcept { return reward_; }
  const Vec& initial() const noexcept { return initial_; }
  bool terminal(std::size_t s) const { return terminal_.at(s); }
  const std::vector<bool>& terminal_flags() const noexcept { return terminal_; }
  std::optional<int> horizon() const noexcept { return horizon_; }
  std::optional<double> discount() const noexcept { return discount_; }

  /// Horizon for FiniteHorizon solves; throws ValidationError if absent.
  int require_horizon() const;
  /// Discount for Discounted solves; throws ValidationError if absent or 1.
  double require_discount() const;

  void check_state(std::size_t s) const;
  void check_action(std::size_t a) const;

 private:
  std::vector<Mat> transition_;
  Mat reward_;
  Vec initial_;
  std::vector<bool> terminal_;
  std::optional<int> horizon_;
  std::optional<double> discount_;
};

/// Tabular stochastic policy; probs(s, a).
class StochasticTabularPolicy {
 public:
  explicit StochasticTabularPolicy(Mat probs);

  static StochasticTabularPolicy uniform(std::size_t n_states, std::size_t n_actions);
  static StochasticTabularPolicy deterministic(const std::vector<std::size_t>& actions, std::size_t n_actions);
  /// Row-wise softmax of logits(s, a).
  static StochasticTabularPolicy softmax(const Mat& logits);

  const Mat& probs() const noexcept { return probs_; }
  double prob(std::size_t s, std::size_t a) const {
    return probs_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a));
  }
  std::size_t n_states() const noexcept { return static_cast<std::size_t>(probs_.rows()); }
  std::size_t n_actions() const noexcept { return static_cast<std::size_t>(probs_.cols()); }

  std::size_t sample(std::size_t s, Rng& rng) const;

 private:
  Mat probs_;
};

/// One continuous action parameter per state (tabular deterministic policy).
class DeterministicTabularActionPolicy {
 public:
  explicit DeterministicTabularActionPolicy(Vec action_param);

  const Vec& params() const noexcept { return params_; }
  double action(std::size_t s) const { return params_(static_cast<Eigen::Index>(s)); }
  std::size_t n_states() const noexcept { return static_cast<std::size_t>(params_.size()); }

 private:
  Vec params_;
};

struct Step {
  std::size_t state;
  std::size_t action;
  double reward;
  std::size_t next_state;
  bool done;
};

struct Trajectory {
  std::vector<Step> steps;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return steps.size(); }
  bool empty() const noexcept { return steps.empty(); }
};

struct TransitionSample {
  std::size_t next_state;
  double reward;
  bool done;
};

/// Draw s' ~ p(.|s,a). done is true when s' is terminal; horizon exhaustion is the caller's concern.
/// A terminal s returns (s, 0, true) without consuming randomness.
TransitionSample sample_transition(const TabularMDP& mdp, std::size_t s, std::size_t a, Rng& rng);

/// Sample a trajectory from the initial distribution, stopping at a terminal state or max_steps.
Trajectory rollout(const TabularMDP& mdp, const StochasticTabularPolicy& policy, Rng& rng, int max_steps);

/// Sum_t gamma^(t-1) r_t.
double trajectory_return(const Trajectory& traj, double discount = 1.0);

/// Inverse-CDF draw from a probability vector (row or column); zero entries are never returned.
template <class D>
std::size_t sample_categorical(const Eigen::DenseBase<D>& probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  Eigen::Index last = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs(i) <= 0.0) continue;
    acc += probs(i);
    last = i;
    if (u < acc) return static_cast<std::size_t>(i);
  }
  return static_cast<std::size_t>(last);
}

}  // namespace entropic
