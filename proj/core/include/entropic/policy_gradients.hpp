#pragma once

#include <vector>

#include "entropic/soft_values.hpp"
#include "entropic/twisting.hpp"

namespace entropic {

/// J^beta of the softmax policy with the given logits, via soft_value_dp.
double softmax_objective(const TabularMDP& mdp, const Mat& logits, const RiskParameter& beta,
                         BackupMode mode = BackupMode::FiniteHorizon);

/// Exact stochastic policy gradient of J^beta w.r.t. softmax logits theta(s, a):
/// (1/beta) sum_t sum_s rho*_t(s) sum_a d pi(a|s) exp(beta (Q_t - V_t)).
/// Risk-neutral beta is routed to risk_neutral_pg.
Mat stochastic_pg_thm1(const TabularMDP& mdp, const Mat& logits, const RiskParameter& beta,
                       BackupMode mode = BackupMode::FiniteHorizon);

/// Exact risk-neutral policy gradient sum_t sum_s d_t(s) sum_a d pi(a|s) Q_t(s, a).
Mat risk_neutral_pg(const TabularMDP& mdp, const Mat& logits, BackupMode mode = BackupMode::FiniteHorizon);

/// Off-policy gradient for direct probability parameters:
/// g(s, a) = (1/beta) rho_b(s) exp(beta Q(s, a)), using the first-stage Q.
/// Returns the raw gradient; keeping the step on the simplex is the caller's job.
Mat off_policy_grad_stoch(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const RiskParameter& beta,
                          const Vec& rho_b, BackupMode mode = BackupMode::Discounted);

/// Same quantity computed from exp_value_dp, g(s, a) = (1/beta) rho_b(s) Z_q(s, a).
Mat off_policy_grad_stoch_reference(const TabularMDP& mdp, const StochasticTabularPolicy& policy,
                                    const RiskParameter& beta, const Vec& rho_b,
                                    BackupMode mode = BackupMode::Discounted);

/// Risk-neutral counterpart rho_b(s) Q(s, a).
Mat risk_neutral_off_policy_grad_stoch(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const Vec& rho_b,
                                       BackupMode mode = BackupMode::Discounted);

/// Euclidean projection of v onto the probability simplex.
Vec project_to_simplex(const Vec& v);

struct ImprovementReport {
  bool passed = false;
  /// Largest alpha in the schedule that passed (schedules are tried in the given order).
  double alpha = 0.0;
  /// V^beta_{theta'} - V^beta_theta per state at the passing alpha, or at the last alpha tried.
  Vec delta_v;
  /// Smallest per-state change for every alpha tried, in schedule order.
  std::vector<double> min_delta;
  /// Stochastic variant only: some alpha passed with the raw step already inside the simplex.
  bool unprojected_passed = false;
};

inline constexpr double kImprovementTolerance = 1e-12;

std::vector<double> default_alpha_schedule();

/// Policy improvement check for the stochastic variant: theta' = proj(pi + alpha g), in discounted mode.
ImprovementReport improvement_check_stoch(const TabularMDP& mdp, const StochasticTabularPolicy& policy,
                                          const RiskParameter& beta, const Vec& rho_b,
                                          const std::vector<double>& alpha_schedule = default_alpha_schedule());

}  // namespace entropic
