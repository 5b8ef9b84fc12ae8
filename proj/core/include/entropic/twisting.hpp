#pragma once

#include <vector>

#include "entropic/soft_values.hpp"

namespace entropic {

/// Exponentially twisted dynamics, policy and initial distribution.
///
/// Finite horizon: stage_p_star[t][a](s, s') is proportional to p(s'|s,a) exp(beta V_{t+1}(s')),
/// stage_pi_star[t](s, a) to pi(a|s) exp(beta Q_t(s,a)), and stage_rho[t] is the twisted state
/// distribution at stage t (stage_rho[0] = p1_star, T+1 entries). rho_star sums stage_rho.
/// Discounted: one stage, continuation twisted by exp(beta gamma V), and rho_star solves
/// rho = p1_star + gamma M_star^T rho.
struct TwistedModel {
  BackupMode mode = BackupMode::FiniteHorizon;
  std::vector<std::vector<Mat>> stage_p_star;
  std::vector<Mat> stage_pi_star;
  Vec p1_star;
  std::vector<Vec> stage_rho;
  Vec rho_star;

  const std::vector<Mat>& p_star() const { return stage_p_star.front(); }
  const Mat& pi_star() const { return stage_pi_star.front(); }
};

TwistedModel twist(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const SoftValueTable& values);

/// Untwisted state distributions d_t under (p1, pi, p) in the same stage layout.
/// Discounted mode returns the single discounted occupancy (I - gamma M^T)^{-1} p1.
std::vector<Vec> state_distributions(const TabularMDP& mdp, const StochasticTabularPolicy& policy, BackupMode mode);

}  // namespace entropic
