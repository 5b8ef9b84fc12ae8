#include "entropic/mdp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "entropic/errors.hpp"

namespace entropic {

namespace {

std::string row_name(const char* table, std::size_t s, std::size_t a) {
  std::ostringstream os;
  os << table << "[" << s << "][" << a << "]";
  return os.str();
}

void check_distribution(const Eigen::Ref<const Eigen::RowVectorXd>& row, const std::string& name) {
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (!std::isfinite(row(i)) || row(i) < 0.0) {
      std::ostringstream os;
      os << name << " has invalid entry " << row(i) << " at index " << i;
      throw ValidationError(os.str());
    }
  }
  const double sum = row.sum();
  if (std::abs(sum - 1.0) > kRowTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << name << " sums to " << sum << " (expected 1)";
    throw ValidationError(os.str());
  }
}

}  // namespace

RiskParameter::RiskParameter(double beta, double floor) : beta_(beta), floor_(floor) {
  if (!std::isfinite(beta)) throw ValidationError("beta must be finite");
  if (!(floor >= 0.0)) throw ValidationError("beta floor must be non-negative");
}

bool RiskParameter::risk_neutral() const noexcept { return std::abs(beta_) < floor_; }

TabularMDP::TabularMDP(std::vector<Mat> transition, Mat reward, Vec initial, std::vector<bool> terminal,
                       std::optional<int> horizon, std::optional<double> discount)
    : transition_(std::move(transition)),
      reward_(std::move(reward)),
      initial_(std::move(initial)),
      terminal_(std::move(terminal)),
      horizon_(horizon),
      discount_(discount) {
  const auto n_s = reward_.rows();
  const auto n_a = reward_.cols();
  if (n_s == 0 || n_a == 0) throw ValidationError("MDP needs at least one state and one action");
  if (static_cast<Eigen::Index>(transition_.size()) != n_a)
    throw ValidationError("transition has " + std::to_string(transition_.size()) + " action slices, reward has " +
                          std::to_string(n_a) + " columns");
  for (std::size_t a = 0; a < transition_.size(); ++a)
    if (transition_[a].rows() != n_s || transition_[a].cols() != n_s)
      throw ValidationError("transition slice for action " + std::to_string(a) + " is not |S| x |S|");
  if (initial_.size() != n_s) throw ValidationError("initial distribution length differs from n_states");
  if (static_cast<Eigen::Index>(terminal_.size()) != n_s) throw ValidationError("terminal flags length differs from n_states");

  for (Eigen::Index s = 0; s < n_s; ++s) {
    for (Eigen::Index a = 0; a < n_a; ++a) {
      const auto su = static_cast<std::size_t>(s);
      const auto au = static_cast<std::size_t>(a);
      check_distribution(transition_[au].row(s), row_name("transition", su, au));
      if (!std::isfinite(reward_(s, a))) throw ValidationError(row_name("reward", su, au) + " is not finite");
      if (terminal_[su]) {
        if (std::abs(transition_[au](s, s) - 1.0) > kRowTolerance)
          throw ValidationError(row_name("transition", su, au) + " of terminal state must self-loop");
        if (reward_(s, a) != 0.0) throw ValidationError(row_name("reward", su, au) + " of terminal state must be 0");
      }
    }
  }
  check_distribution(initial_.transpose(), "initial");
  if (horizon_ && *horizon_ < 1) throw ValidationError("horizon must be >= 1");
  if (discount_ && !(*discount_ > 0.0 && *discount_ <= 1.0)) throw ValidationError("discount must lie in (0, 1]");
}

int TabularMDP::require_horizon() const {
  if (!horizon_) throw ValidationError("finite-horizon solve requested but MDP has no horizon");
  return *horizon_;
}

double TabularMDP::require_discount() const {
  if (!discount_ || *discount_ >= 1.0)
    throw ValidationError("discounted solve requested but MDP has no discount < 1");
  return *discount_;
}

void TabularMDP::check_state(std::size_t s) const {
  if (s >= n_states()) throw std::out_of_range("state " + std::to_string(s) + " out of range");
}

void TabularMDP::check_action(std::size_t a) const {
  if (a >= n_actions()) throw std::out_of_range("action " + std::to_string(a) + " out of range");
}

StochasticTabularPolicy::StochasticTabularPolicy(Mat probs) : probs_(std::move(probs)) {
  for (Eigen::Index s = 0; s < probs_.rows(); ++s)
    check_distribution(probs_.row(s), "policy[" + std::to_string(s) + "]");
}

StochasticTabularPolicy StochasticTabularPolicy::uniform(std::size_t n_states, std::size_t n_actions) {
  return StochasticTabularPolicy(Mat::Constant(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_actions),
                                               1.0 / static_cast<double>(n_actions)));
}

StochasticTabularPolicy StochasticTabularPolicy::deterministic(const std::vector<std::size_t>& actions,
                                                               std::size_t n_actions) {
  Mat p = Mat::Zero(static_cast<Eigen::Index>(actions.size()), static_cast<Eigen::Index>(n_actions));
  for (std::size_t s = 0; s < actions.size(); ++s) {
    if (actions[s] >= n_actions) throw std::out_of_range("deterministic policy action out of range");
    p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(actions[s])) = 1.0;
  }
  return StochasticTabularPolicy(std::move(p));
}

StochasticTabularPolicy StochasticTabularPolicy::softmax(const Mat& logits) {
  Mat p(logits.rows(), logits.cols());
  for (Eigen::Index s = 0; s < logits.rows(); ++s) {
    const double m = logits.row(s).maxCoeff();
    p.row(s) = (logits.row(s).array() - m).exp().matrix();
    p.row(s) /= p.row(s).sum();
  }
  return StochasticTabularPolicy(std::move(p));
}

std::size_t StochasticTabularPolicy::sample(std::size_t s, Rng& rng) const {
  if (s >= n_states()) throw std::out_of_range("policy state out of range");
  return sample_categorical(probs_.row(static_cast<Eigen::Index>(s)), rng);
}

DeterministicTabularActionPolicy::DeterministicTabularActionPolicy(Vec action_param) : params_(std::move(action_param)) {
  if (!params_.allFinite()) throw ValidationError("deterministic action parameters must be finite");
}

TransitionSample sample_transition(const TabularMDP& mdp, std::size_t s, std::size_t a, Rng& rng) {
  mdp.check_state(s);
  mdp.check_action(a);
  if (mdp.terminal(s)) return {s, 0.0, true};
  const std::size_t next = sample_categorical(mdp.transition_row(s, a), rng);
  return {next, mdp.reward(s, a), mdp.terminal(next)};
}

Trajectory rollout(const TabularMDP& mdp, const StochasticTabularPolicy& policy, Rng& rng, int max_steps) {
  if (max_steps < 1) throw ValidationError("rollout requires max_steps >= 1");
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions())
    throw ValidationError("policy shape does not match MDP");
  Trajectory traj;
  traj.seed = rng.key();
  std::size_t s = sample_categorical(mdp.initial(), rng);
  for (int t = 0; t < max_steps; ++t) {
    const std::size_t a = policy.sample(s, rng);
    const TransitionSample tr = sample_transition(mdp, s, a, rng);
    traj.steps.push_back({s, a, tr.reward, tr.next_state, tr.done});
    if (tr.done) break;
    s = tr.next_state;
  }
  return traj;
}

double trajectory_return(const Trajectory& traj, double discount) {
  if (!(discount > 0.0 && discount <= 1.0)) throw ValidationError("discount must lie in (0, 1]");
  double g = 0.0;
  double w = 1.0;
  for (const Step& st : traj.steps) {
    g += w * st.reward;
    w *= discount;
  }
  return g;
}

}  // namespace entropic
