#pragma once

#include <cstddef>

#include "entropic/mdp.hpp"

namespace entropic {

inline constexpr std::size_t kDefaultEnumerationBudget = 2'000'000;

struct ReturnMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Exact J^beta over all length-T trajectories, (1/beta) log sum_tau p(tau) exp(beta G(tau)).
/// Throws BudgetExceeded when (|S| |A|)^T exceeds the budget. Risk-neutral beta gives E[G].
double entropic_risk_enumerate(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const RiskParameter& beta,
                               std::size_t budget = kDefaultEnumerationBudget);

/// Mean and variance (population) of the undiscounted T-step return.
ReturnMoments return_moments(const TabularMDP& mdp, const StochasticTabularPolicy& policy,
                             std::size_t budget = kDefaultEnumerationBudget);

struct TaylorGap {
  double j_beta = 0.0;
  double mean_plus_half_beta_var = 0.0;
  double gap() const noexcept;
};

/// Both sides of J^beta ~ E[G] + (beta/2) Var[G].
TaylorGap taylor_gap(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const RiskParameter& beta,
                     std::size_t budget = kDefaultEnumerationBudget);

}  // namespace entropic
