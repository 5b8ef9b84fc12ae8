#pragma once

#include <optional>
#include <vector>

#include "entropic/mdp.hpp"
#include "entropic/policy_gradients.hpp"

namespace entropic {

/// Finite states, scalar action on [a_lo, a_hi], no terminal states.
///
/// p(s'|s, a) = softmax_{s'}(u(s, s') + w(s, s') a) and
/// r(s, a) = c0(s) + c1(s) a + c2(s) a^2, so both are smooth with closed-form derivatives.
class FiniteStateContinuousActionMDP {
 public:
  FiniteStateContinuousActionMDP(Mat u, Mat w, Vec c0, Vec c1, Vec c2, Vec initial, int horizon,
                                 std::optional<double> discount = std::nullopt, double a_lo = -2.0, double a_hi = 2.0);

  std::size_t n_states() const noexcept { return static_cast<std::size_t>(u_.rows()); }
  int horizon() const noexcept { return horizon_; }
  std::optional<double> discount() const noexcept { return discount_; }
  double require_discount() const;
  double action_low() const noexcept { return a_lo_; }
  double action_high() const noexcept { return a_hi_; }
  const Vec& initial() const noexcept { return initial_; }
  const Mat& scores_slope() const noexcept { return w_; }

  /// Throws DomainError outside [a_lo, a_hi].
  void check_action(double a) const;

  Vec transition(std::size_t s, double a) const;
  /// d p(.|s, a) / d a = p (w_s - <p, w_s>).
  Vec transition_da(std::size_t s, double a) const;
  double reward(std::size_t s, double a) const;
  double reward_da(std::size_t s, double a) const;

 private:
  Mat u_;
  Mat w_;
  Vec c0_;
  Vec c1_;
  Vec c2_;
  Vec initial_;
  int horizon_;
  std::optional<double> discount_;
  double a_lo_;
  double a_hi_;
};

/// Stage values of a deterministic policy: stage_v[t](s) = Q_t(s, mu(s)), stage_v[T] = 0.
/// Discounted mode stores the fixed point twice (stage 0 and its successor).
struct DeterministicValues {
  BackupMode mode = BackupMode::FiniteHorizon;
  double beta = 0.0;
  bool risk_neutral = false;
  std::vector<Vec> stage_v;

  std::size_t stages() const noexcept { return mode == BackupMode::Discounted ? 1 : stage_v.size() - 1; }
  const Vec& next_v(std::size_t t) const { return mode == BackupMode::Discounted ? stage_v.front() : stage_v.at(t + 1); }
};

DeterministicValues deterministic_values(const FiniteStateContinuousActionMDP& cmdp,
                                         const DeterministicTabularActionPolicy& policy, const RiskParameter& beta,
                                         BackupMode mode = BackupMode::FiniteHorizon, const SolveOptions& options = {});

/// Q_t(s, a) for any action given the stage's successor values.
double deterministic_q(const FiniteStateContinuousActionMDP& cmdp, const DeterministicValues& values, std::size_t t,
                       std::size_t s, double a);
/// d Q_t(s, a) / d a in closed form.
double deterministic_q_da(const FiniteStateContinuousActionMDP& cmdp, const DeterministicValues& values,
                          std::size_t t, std::size_t s, double a);

/// J^beta(mu) = (1/beta) log sum_s p1(s) exp(beta V_0(s)).
double deterministic_objective(const FiniteStateContinuousActionMDP& cmdp, const DeterministicTabularActionPolicy& policy,
                               const RiskParameter& beta, BackupMode mode = BackupMode::FiniteHorizon);

/// Exact deterministic policy gradient sum_t sum_s rho*_t(s) dmu(s)/dtheta dQ_t/da at a = mu(s),
/// with theta(s) = mu(s). Returns one entry per state.
Vec deterministic_pg_thm2(const FiniteStateContinuousActionMDP& cmdp, const DeterministicTabularActionPolicy& policy,
                          const RiskParameter& beta, BackupMode mode = BackupMode::FiniteHorizon);

/// Twisted state distributions per stage (finite horizon: T entries used by the gradient), or the
/// discounted twisted occupancy as a single entry.
std::vector<Vec> deterministic_twisted_rho(const FiniteStateContinuousActionMDP& cmdp,
                                           const DeterministicTabularActionPolicy& policy, const RiskParameter& beta,
                                           BackupMode mode = BackupMode::FiniteHorizon);

/// Off-policy approximation g(s) = rho_b(s) dQ(s, a)/da at a = mu(s), using the first-stage Q.
Vec off_policy_grad_det(const FiniteStateContinuousActionMDP& cmdp, const DeterministicTabularActionPolicy& policy,
                        const RiskParameter& beta, const Vec& rho_b, BackupMode mode = BackupMode::Discounted);

/// Independent recomputation of off_policy_grad_det through the exponential recursion Z = exp(beta V).
Vec off_policy_grad_det_reference(const FiniteStateContinuousActionMDP& cmdp,
                                  const DeterministicTabularActionPolicy& policy, const RiskParameter& beta,
                                  const Vec& rho_b, BackupMode mode = BackupMode::Discounted);

/// Checks V^beta_{theta + alpha g} >= V^beta_theta at every state (discounted mode) over the schedule.
/// Steps leaving the action interval count as failures for that alpha.
ImprovementReport improvement_check_det(const FiniteStateContinuousActionMDP& cmdp,
                                        const DeterministicTabularActionPolicy& policy, const RiskParameter& beta,
                                        const Vec& rho_b,
                                        const std::vector<double>& alpha_schedule = default_alpha_schedule());

}  // namespace entropic
