#include "entropic/enumerate.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "entropic/errors.hpp"
#include "entropic/logmath.hpp"

namespace entropic {

namespace {

struct Outcome {
  double log_prob;
  double ret;
};

void check_budget(const TabularMDP& mdp, int horizon, std::size_t budget) {
  const double branches = std::pow(static_cast<double>(mdp.n_states() * mdp.n_actions()), horizon);
  if (branches > static_cast<double>(budget))
    throw BudgetExceeded("enumeration of " + std::to_string(branches) + " trajectories exceeds budget " +
                         std::to_string(budget));
}

// Depth-first walk over (s_t, a_t) pairs; zero-probability branches are pruned and
// a trajectory that reaches a terminal state stops accruing reward.
void walk(const TabularMDP& mdp, const StochasticTabularPolicy& policy, std::size_t s, int steps_left, double log_prob,
          double ret, std::vector<Outcome>& out) {
  if (steps_left == 0 || mdp.terminal(s)) {
    out.push_back({log_prob, ret});
    return;
  }
  for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
    const double pa = policy.prob(s, a);
    if (pa <= 0.0) continue;
    const double r = ret + mdp.reward(s, a);
    if (steps_left == 1) {
      out.push_back({log_prob + std::log(pa), r});
      continue;
    }
    for (std::size_t n = 0; n < mdp.n_states(); ++n) {
      const double pn = mdp.transition(s, a, n);
      if (pn <= 0.0) continue;
      walk(mdp, policy, n, steps_left - 1, log_prob + std::log(pa) + std::log(pn), r, out);
    }
  }
}

std::vector<Outcome> enumerate(const TabularMDP& mdp, const StochasticTabularPolicy& policy, std::size_t budget) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions())
    throw ValidationError("policy shape does not match MDP");
  const int horizon = mdp.require_horizon();
  check_budget(mdp, horizon, budget);
  std::vector<Outcome> out;
  for (std::size_t s = 0; s < mdp.n_states(); ++s) {
    const double p0 = mdp.initial()(static_cast<Eigen::Index>(s));
    if (p0 <= 0.0) continue;
    walk(mdp, policy, s, horizon, std::log(p0), 0.0, out);
  }
  return out;
}

ReturnMoments moments_of(const std::vector<Outcome>& outcomes) {
  ReturnMoments m;
  for (const auto& o : outcomes) m.mean += std::exp(o.log_prob) * o.ret;
  for (const auto& o : outcomes) m.variance += std::exp(o.log_prob) * (o.ret - m.mean) * (o.ret - m.mean);
  return m;
}

}  // namespace

double entropic_risk_enumerate(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const RiskParameter& beta,
                               std::size_t budget) {
  const auto outcomes = enumerate(mdp, policy, budget);
  if (beta.risk_neutral()) return moments_of(outcomes).mean;
  std::vector<double> terms;
  terms.reserve(outcomes.size());
  for (const auto& o : outcomes) terms.push_back(o.log_prob + beta.beta() * o.ret);
  return log_sum_exp(terms) / beta.beta();
}

ReturnMoments return_moments(const TabularMDP& mdp, const StochasticTabularPolicy& policy, std::size_t budget) {
  return moments_of(enumerate(mdp, policy, budget));
}

double TaylorGap::gap() const noexcept { return std::abs(j_beta - mean_plus_half_beta_var); }

TaylorGap taylor_gap(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const RiskParameter& beta,
                     std::size_t budget) {
  const auto m = return_moments(mdp, policy, budget);
  TaylorGap g;
  g.j_beta = entropic_risk_enumerate(mdp, policy, beta, budget);
  g.mean_plus_half_beta_var = m.mean + 0.5 * beta.beta() * m.variance;
  return g;
}

}  // namespace entropic
