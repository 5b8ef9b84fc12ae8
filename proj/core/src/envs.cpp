#include "entropic/envs.hpp"

#include <cmath>

#include "entropic/errors.hpp"

namespace entropic {

Vec cartpole_dynamics(const CartPoleParams& p, const Vec& s, double force) {
  const double x = s(0), x_dot = s(1), theta = s(2), theta_dot = s(3);
  const double total_mass = p.mass_cart + p.mass_pole;
  const double pole_mass_length = p.mass_pole * p.half_length;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
  const double theta_acc =
      (p.gravity * sin_t - cos_t * temp) /
      (p.half_length * (4.0 / 3.0 - p.mass_pole * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;
  Vec next(4);
  next << x + p.tau * x_dot, x_dot + p.tau * x_acc, theta + p.tau * theta_dot, theta_dot + p.tau * theta_acc;
  return next;
}

bool cartpole_failed(const CartPoleParams& p, const Vec& s) {
  return s(0) < -p.x_threshold || s(0) > p.x_threshold || s(2) < -p.theta_threshold || s(2) > p.theta_threshold;
}

namespace {

Vec cartpole_reset(const CartPoleParams& p, Rng& rng) {
  Vec s(4);
  for (Eigen::Index i = 0; i < 4; ++i) s(i) = rng.uniform(-p.reset_bound, p.reset_bound);
  return s;
}

void check_action(const ContinuousEnv& env, const Vec& a) {
  if (a.size() != env.action_dim())
    throw ValidationError(env.name() + " expects " + std::to_string(env.action_dim()) + " action dimensions");
  if (!a.allFinite()) throw DomainError(env.name() + " received a non-finite action");
}

}  // namespace

Vec CartPole::reset(Rng& rng) const { return cartpole_reset(p_, rng); }

EnvStep CartPole::step(const Vec& state, int action, Rng&) const {
  if (action != 0 && action != 1) throw ValidationError("cart-pole action must be 0 or 1");
  EnvStep out;
  out.state = cartpole_dynamics(p_, state, action == 1 ? p_.force_mag : -p_.force_mag);
  out.reward = 1.0;
  out.done = cartpole_failed(p_, out.state);
  return out;
}

RiskyPendulum::RiskyPendulum(double noise_sigma, double threshold, CartPoleParams params)
    : p_(params), sigma_(noise_sigma), threshold_(threshold) {
  if (!(noise_sigma >= 0.0)) throw ValidationError("pendulum noise sigma must be non-negative");
}

Vec RiskyPendulum::reset(Rng& rng) const { return cartpole_reset(p_, rng); }

EnvStep RiskyPendulum::step(const Vec& state, const Vec& action, Rng& rng) const {
  check_action(*this, action);
  const Vec a = clamp_action(*this, action);
  EnvStep out;
  out.state = cartpole_dynamics(p_, state, a(0) * p_.force_mag);
  out.risky = risky(out.state);
  out.reward = 1.0;
  if (out.risky) out.reward += rng.normal(0.0, sigma_);
  out.done = cartpole_failed(p_, out.state);
  return out;
}

void PointMassSpec::validate() const {
  if (!(dt > 0.0)) throw ValidationError("point-mass dt must be positive");
  if (!(goal_radius > 0.0)) throw ValidationError("point-mass goal radius must be positive");
  if (!(region_x_lo < region_x_hi && region_y_lo < region_y_hi))
    throw ValidationError("point-mass risky region is empty");
  if (!(noise_sigma >= 0.0)) throw ValidationError("point-mass noise sigma must be non-negative");
  if (max_steps < 1) throw ValidationError("point-mass max_steps must be positive");
  if (!(bound > 0.0)) throw ValidationError("point-mass bound must be positive");
}

RiskyPointMass::RiskyPointMass(PointMassSpec spec) : s_(spec) { s_.validate(); }

Vec RiskyPointMass::reset(Rng&) const {
  Vec s(2);
  s << s_.start_x, s_.start_y;
  return s;
}

bool RiskyPointMass::risky(const Vec& state) const {
  return state(0) >= s_.region_x_lo && state(0) <= s_.region_x_hi && state(1) >= s_.region_y_lo &&
         state(1) <= s_.region_y_hi;
}

EnvStep RiskyPointMass::step(const Vec& state, const Vec& action, Rng& rng) const {
  check_action(*this, action);
  Vec v = clamp_action(*this, action);
  const double speed = v.norm();
  if (speed > 1.0) v /= speed;
  EnvStep out;
  out.state = (state + s_.dt * v).cwiseMax(-s_.bound).cwiseMin(s_.bound);
  const double dist = std::hypot(out.state(0) - s_.goal_x, out.state(1) - s_.goal_y);
  out.risky = risky(out.state);
  out.reward = -dist;
  if (out.risky) out.reward += rng.normal(0.0, s_.noise_sigma);
  out.done = dist <= s_.goal_radius;
  return out;
}

RiskyBandit::RiskyBandit(double safe_reward, double risky_mean, double risky_sigma)
    : safe_(safe_reward), mean_(risky_mean), sigma_(risky_sigma) {
  if (!(risky_sigma >= 0.0)) throw ValidationError("bandit risky sigma must be non-negative");
}

Vec RiskyBandit::reset(Rng&) const { return Vec::Zero(1); }

EnvStep RiskyBandit::step(const Vec&, const Vec& action, Rng& rng) const {
  check_action(*this, action);
  const bool take_risky = clamp_action(*this, action)(0) >= 0.0;
  EnvStep out;
  out.state = Vec::Constant(1, take_risky ? 1.0 : -1.0);
  out.risky = risky(out.state);
  out.reward = take_risky ? rng.normal(mean_, sigma_) : safe_;
  out.done = true;
  return out;
}

double RiskyBandit::safe_value(double) const noexcept { return safe_; }
double RiskyBandit::risky_value(double beta) const noexcept { return mean_ + 0.5 * beta * sigma_ * sigma_; }

std::unique_ptr<ContinuousEnv> make_continuous_env(const std::string& name) {
  if (name == "pendulum-risky") return std::make_unique<RiskyPendulum>();
  if (name == "pointmass-risky") return std::make_unique<RiskyPointMass>();
  if (name == "bandit-risky") return std::make_unique<RiskyBandit>();
  throw ValidationError("unknown continuous env '" + name + "' (expected pendulum-risky, pointmass-risky or bandit-risky)");
}

Vec clamp_action(const ContinuousEnv& env, const Vec& a) {
  return a.cwiseMax(env.action_low()).cwiseMin(env.action_high());
}

}  // namespace entropic
