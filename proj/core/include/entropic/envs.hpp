#pragma once

#include <limits>
#include <memory>
#include <string>

#include "entropic/mdp.hpp"
#include "entropic/rng.hpp"

namespace entropic {

/// Result of one environment step. risky is the env's predicate on the next state,
/// the same test that switches the reward noise on.
struct EnvStep {
  Vec state;
  double reward = 0.0;
  bool done = false;
  bool risky = false;
};

/// Continuous-action environment with a pure step function: the outcome depends only on
/// (state, action, rng draws). Actions are clamped to [action_low, action_high] per dimension.
class ContinuousEnv {
 public:
  virtual ~ContinuousEnv() = default;
  virtual std::string name() const = 0;
  virtual Eigen::Index state_dim() const = 0;
  virtual Eigen::Index action_dim() const = 0;
  virtual double action_low() const { return -1.0; }
  virtual double action_high() const { return 1.0; }
  virtual int max_episode_steps() const = 0;
  virtual Vec reset(Rng& rng) const = 0;
  virtual EnvStep step(const Vec& state, const Vec& action, Rng& rng) const = 0;
  virtual bool risky(const Vec& state) const = 0;
};

/// Classic pole-balancing constants (Barto, Sutton and Anderson), explicit Euler at tau.
struct CartPoleParams {
  double gravity = 9.8;
  double mass_cart = 1.0;
  double mass_pole = 0.1;
  double half_length = 0.5;
  double force_mag = 10.0;
  double tau = 0.02;
  double x_threshold = 2.4;
  double theta_threshold = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  double reset_bound = 0.05;
  int max_steps = 200;
};

/// State (x, x_dot, theta, theta_dot) after applying a horizontal force for one step.
Vec cartpole_dynamics(const CartPoleParams& p, const Vec& state, double force);
bool cartpole_failed(const CartPoleParams& p, const Vec& state);

/// Discrete cart-pole: action 0 pushes left, 1 pushes right, +1 reward per step including
/// the failing one. Episodes are capped at max_steps by the caller; the cap is not a terminal.
class CartPole {
 public:
  static constexpr int kActions = 2;
  explicit CartPole(CartPoleParams params = {}) : p_(params) {}
  const CartPoleParams& params() const noexcept { return p_; }
  Eigen::Index state_dim() const noexcept { return 4; }
  int max_episode_steps() const noexcept { return p_.max_steps; }
  Vec reset(Rng& rng) const;
  EnvStep step(const Vec& state, int action, Rng& rng) const;

 private:
  CartPoleParams p_;
};

/// Cart-pole with a continuous force a * force_mag, a in [-1, 1]. Reward 1 per step plus
/// N(0, noise_sigma^2) whenever the next cart position exceeds threshold.
class RiskyPendulum final : public ContinuousEnv {
 public:
  explicit RiskyPendulum(double noise_sigma = 1.0, double threshold = 0.01, CartPoleParams params = {});
  std::string name() const override { return "pendulum-risky"; }
  Eigen::Index state_dim() const override { return 4; }
  Eigen::Index action_dim() const override { return 1; }
  int max_episode_steps() const override { return p_.max_steps; }
  Vec reset(Rng& rng) const override;
  EnvStep step(const Vec& state, const Vec& action, Rng& rng) const override;
  bool risky(const Vec& state) const override { return state(0) > threshold_; }

 private:
  CartPoleParams p_;
  double sigma_;
  double threshold_;
};

struct PointMassSpec {
  double start_x = 0.0, start_y = 0.0;
  double goal_x = 2.0, goal_y = 0.0;
  double goal_radius = 0.1;
  double dt = 0.1;
  /// Risky rectangle [x_lo, x_hi] x [y_lo, y_hi].
  double region_x_lo = 0.5, region_x_hi = 1.5;
  double region_y_lo = -0.6, region_y_hi = 0.6;
  double noise_sigma = 2.0;
  /// Positions are clamped to this box.
  double bound = 3.0;
  int max_steps = 60;

  void validate() const;
};

/// 2D point with velocity control v in [-1, 1]^2, rescaled to unit norm when longer.
/// Reward is minus the distance to the goal after the move, plus N(0, sigma^2) inside the
/// risky rectangle. Reaching the goal radius ends the episode.
class RiskyPointMass final : public ContinuousEnv {
 public:
  explicit RiskyPointMass(PointMassSpec spec = {});
  const PointMassSpec& spec() const noexcept { return s_; }
  std::string name() const override { return "pointmass-risky"; }
  Eigen::Index state_dim() const override { return 2; }
  Eigen::Index action_dim() const override { return 2; }
  int max_episode_steps() const override { return s_.max_steps; }
  Vec reset(Rng& rng) const override;
  EnvStep step(const Vec& state, const Vec& action, Rng& rng) const override;
  bool risky(const Vec& state) const override;

 private:
  PointMassSpec s_;
};

/// One-step bandit: a < 0 pays safe_reward, a >= 0 pays N(risky_mean, risky_sigma^2).
/// The state is 0 before the pull and +1 / -1 after a risky / safe pull.
class RiskyBandit final : public ContinuousEnv {
 public:
  RiskyBandit(double safe_reward = 1.0, double risky_mean = 1.0, double risky_sigma = 2.0);
  std::string name() const override { return "bandit-risky"; }
  Eigen::Index state_dim() const override { return 1; }
  Eigen::Index action_dim() const override { return 1; }
  int max_episode_steps() const override { return 1; }
  Vec reset(Rng& rng) const override;
  EnvStep step(const Vec& state, const Vec& action, Rng& rng) const override;
  bool risky(const Vec& state) const override { return state(0) > 0.0; }

  double safe_reward() const noexcept { return safe_; }
  double risky_mean() const noexcept { return mean_; }
  double risky_sigma() const noexcept { return sigma_; }
  /// Exact entropic value of each arm: safe_reward and risky_mean + beta sigma^2 / 2.
  double safe_value(double beta) const noexcept;
  double risky_value(double beta) const noexcept;
  bool prefers_risky(double beta) const noexcept { return risky_value(beta) > safe_value(beta); }

 private:
  double safe_;
  double mean_;
  double sigma_;
};

/// Build a continuous env by CLI name: pendulum-risky, pointmass-risky or bandit-risky.
std::unique_ptr<ContinuousEnv> make_continuous_env(const std::string& name);

/// Clamp each coordinate of a to the env's action interval.
Vec clamp_action(const ContinuousEnv& env, const Vec& a);

}  // namespace entropic
