#include "entropic/continuous_action_mdp.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>

#include "entropic/errors.hpp"
#include "entropic/logmath.hpp"

namespace entropic {

FiniteStateContinuousActionMDP::FiniteStateContinuousActionMDP(Mat u, Mat w, Vec c0, Vec c1, Vec c2, Vec initial,
                                                               int horizon, std::optional<double> discount, double a_lo,
                                                               double a_hi)
    : u_(std::move(u)),
      w_(std::move(w)),
      c0_(std::move(c0)),
      c1_(std::move(c1)),
      c2_(std::move(c2)),
      initial_(std::move(initial)),
      horizon_(horizon),
      discount_(discount),
      a_lo_(a_lo),
      a_hi_(a_hi) {
  const auto n = u_.rows();
  if (n == 0 || u_.cols() != n || w_.rows() != n || w_.cols() != n)
    throw ValidationError("transition score tables must be n_states x n_states");
  if (c0_.size() != n || c1_.size() != n || c2_.size() != n || initial_.size() != n)
    throw ValidationError("reward coefficients and initial distribution need n_states entries");
  if (!u_.allFinite() || !w_.allFinite() || !c0_.allFinite() || !c1_.allFinite() || !c2_.allFinite())
    throw ValidationError("continuous-action MDP coefficients must be finite");
  if ((initial_.array() < 0.0).any() || std::abs(initial_.sum() - 1.0) > kRowTolerance)
    throw ValidationError("initial distribution must sum to 1");
  if (horizon_ < 1) throw ValidationError("horizon must be >= 1");
  if (discount_ && !(*discount_ > 0.0 && *discount_ < 1.0)) throw ValidationError("discount must lie in (0, 1)");
  if (!(a_lo_ < a_hi_)) throw ValidationError("action interval is empty");
}

double FiniteStateContinuousActionMDP::require_discount() const {
  if (!discount_) throw ValidationError("discounted solve requested but MDP has no discount");
  return *discount_;
}

void FiniteStateContinuousActionMDP::check_action(double a) const {
  if (!(a >= a_lo_ && a <= a_hi_)) {
    std::ostringstream os;
    os << "action " << a << " outside [" << a_lo_ << ", " << a_hi_ << "]";
    throw DomainError(os.str());
  }
}

Vec FiniteStateContinuousActionMDP::transition(std::size_t s, double a) const {
  const auto si = static_cast<Eigen::Index>(s);
  const Vec score = (u_.row(si) + a * w_.row(si)).transpose();
  const Vec p = (score.array() - score.maxCoeff()).exp().matrix();
  return p / p.sum();
}

Vec FiniteStateContinuousActionMDP::transition_da(std::size_t s, double a) const {
  const Vec p = transition(s, a);
  const Vec ws = w_.row(static_cast<Eigen::Index>(s)).transpose();
  return p.cwiseProduct((ws.array() - p.dot(ws)).matrix());
}

double FiniteStateContinuousActionMDP::reward(std::size_t s, double a) const {
  const auto i = static_cast<Eigen::Index>(s);
  return c0_(i) + a * (c1_(i) + a * c2_(i));
}

double FiniteStateContinuousActionMDP::reward_da(std::size_t s, double a) const {
  const auto i = static_cast<Eigen::Index>(s);
  return c1_(i) + 2.0 * c2_(i) * a;
}

namespace {

double stage_gamma(const FiniteStateContinuousActionMDP& cmdp, BackupMode mode) {
  return mode == BackupMode::Discounted ? cmdp.require_discount() : 1.0;
}

double continuation(const Vec& p, const Vec& next_v, double beta, double gamma, bool neutral) {
  if (neutral) return gamma * p.dot(next_v);
  return weighted_log_sum_exp(p, Vec(beta * gamma * next_v)) / beta;
}

void check_policy(const FiniteStateContinuousActionMDP& cmdp, const DeterministicTabularActionPolicy& policy) {
  if (policy.n_states() != cmdp.n_states()) throw ValidationError("policy length differs from n_states");
  for (std::size_t s = 0; s < cmdp.n_states(); ++s) cmdp.check_action(policy.action(s));
}

Vec policy_backup(const FiniteStateContinuousActionMDP& cmdp, const DeterministicTabularActionPolicy& policy,
                  const Vec& next_v, double beta, double gamma, bool neutral) {
  Vec v(static_cast<Eigen::Index>(cmdp.n_states()));
  for (std::size_t s = 0; s < cmdp.n_states(); ++s) {
    const double a = policy.action(s);
    v(static_cast<Eigen::Index>(s)) = cmdp.reward(s, a) + continuation(cmdp.transition(s, a), next_v, beta, gamma, neutral);
  }
  return v;
}

Vec discounted_occupancy(const Mat& m, const Vec& start, double gamma) {
  const Mat lhs = Mat::Identity(m.rows(), m.cols()) - gamma * m.transpose();
  return lhs.partialPivLu().solve(start);
}

}  // namespace

DeterministicValues deterministic_values(const FiniteStateContinuousActionMDP& cmdp,
                                         const DeterministicTabularActionPolicy& policy, const RiskParameter& beta,
                                         BackupMode mode, const SolveOptions& options) {
  check_policy(cmdp, policy);
  DeterministicValues dv;
  dv.mode = mode;
  dv.beta = beta.beta();
  dv.risk_neutral = beta.risk_neutral();
  const auto n = static_cast<Eigen::Index>(cmdp.n_states());
  if (mode == BackupMode::FiniteHorizon) {
    const auto horizon = static_cast<std::size_t>(cmdp.horizon());
    dv.stage_v.assign(horizon + 1, Vec::Zero(n));
    for (std::size_t t = horizon; t-- > 0;)
      dv.stage_v[t] = policy_backup(cmdp, policy, dv.stage_v[t + 1], dv.beta, 1.0, dv.risk_neutral);
    return dv;
  }
  const double gamma = cmdp.require_discount();
  Vec v = Vec::Zero(n);
  double residual = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    Vec next = policy_backup(cmdp, policy, v, dv.beta, gamma, dv.risk_neutral);
    residual = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (residual < options.tolerance) {
      dv.stage_v = {v, v};
      return dv;
    }
  }
  throw ConvergenceError("deterministic soft value iteration did not converge", residual);
}

double deterministic_q(const FiniteStateContinuousActionMDP& cmdp, const DeterministicValues& values, std::size_t t,
                       std::size_t s, double a) {
  cmdp.check_action(a);
  return cmdp.reward(s, a) + continuation(cmdp.transition(s, a), values.next_v(t), values.beta,
                                          stage_gamma(cmdp, values.mode), values.risk_neutral);
}

double deterministic_q_da(const FiniteStateContinuousActionMDP& cmdp, const DeterministicValues& values,
                          std::size_t t, std::size_t s, double a) {
  cmdp.check_action(a);
  const double gamma = stage_gamma(cmdp, values.mode);
  const Vec& next_v = values.next_v(t);
  const Vec p = cmdp.transition(s, a);
  const Vec ws = cmdp.scores_slope().row(static_cast<Eigen::Index>(s)).transpose();
  double cont;
  if (values.risk_neutral) {
    cont = gamma * cmdp.transition_da(s, a).dot(next_v);
  } else {
    // (1/beta) sum_s' dp(s')/da e^{beta gamma V'} / sum_s' p e^{beta gamma V'} = (E_p*[w] - E_p[w]) / beta.
    const Vec p_star = twisted_weights(p, Vec(values.beta * gamma * next_v));
    cont = (p_star.dot(ws) - p.dot(ws)) / values.beta;
  }
  return cmdp.reward_da(s, a) + cont;
}

double deterministic_objective(const FiniteStateContinuousActionMDP& cmdp, const DeterministicTabularActionPolicy& policy,
                               const RiskParameter& beta, BackupMode mode) {
  const auto dv = deterministic_values(cmdp, policy, beta, mode);
  if (dv.risk_neutral) return cmdp.initial().dot(dv.stage_v.front());
  return weighted_log_sum_exp(cmdp.initial(), Vec(dv.beta * dv.stage_v.front())) / dv.beta;
}

std::vector<Vec> deterministic_twisted_rho(const FiniteStateContinuousActionMDP& cmdp,
                                           const DeterministicTabularActionPolicy& policy, const RiskParameter& beta,
                                           BackupMode mode) {
  const auto dv = deterministic_values(cmdp, policy, beta, mode);
  const double b = dv.risk_neutral ? 0.0 : dv.beta;
  const double gamma = stage_gamma(cmdp, mode);
  const auto n = static_cast<Eigen::Index>(cmdp.n_states());
  auto twisted_kernel = [&](std::size_t t) {
    Mat m(n, n);
    for (std::size_t s = 0; s < cmdp.n_states(); ++s)
      m.row(static_cast<Eigen::Index>(s)) =
          twisted_weights(cmdp.transition(s, policy.action(s)), Vec(b * gamma * dv.next_v(t))).transpose();
    return m;
  };
  const Vec p1_star = twisted_weights(cmdp.initial(), Vec(b * dv.stage_v.front()));
  if (mode == BackupMode::Discounted) return {discounted_occupancy(twisted_kernel(0), p1_star, gamma)};
  std::vector<Vec> rho{p1_star};
  for (std::size_t t = 0; t < dv.stages(); ++t) rho.push_back(twisted_kernel(t).transpose() * rho.back());
  return rho;
}

Vec deterministic_pg_thm2(const FiniteStateContinuousActionMDP& cmdp, const DeterministicTabularActionPolicy& policy,
                          const RiskParameter& beta, BackupMode mode) {
  const auto dv = deterministic_values(cmdp, policy, beta, mode);
  const auto rho = deterministic_twisted_rho(cmdp, policy, beta, mode);
  Vec grad = Vec::Zero(static_cast<Eigen::Index>(cmdp.n_states()));
  for (std::size_t t = 0; t < dv.stages(); ++t)
    for (std::size_t s = 0; s < cmdp.n_states(); ++s)
      grad(static_cast<Eigen::Index>(s)) +=
          rho[t](static_cast<Eigen::Index>(s)) * deterministic_q_da(cmdp, dv, t, s, policy.action(s));
  return grad;
}

Vec off_policy_grad_det(const FiniteStateContinuousActionMDP& cmdp, const DeterministicTabularActionPolicy& policy,
                        const RiskParameter& beta, const Vec& rho_b, BackupMode mode) {
  if (rho_b.size() != static_cast<Eigen::Index>(cmdp.n_states()) || (rho_b.array() < 0.0).any() ||
      std::abs(rho_b.sum() - 1.0) > 1e-9)
    throw ValidationError("rho_b must be a non-negative distribution over states");
  const auto dv = deterministic_values(cmdp, policy, beta, mode);
  Vec g(rho_b.size());
  for (std::size_t s = 0; s < cmdp.n_states(); ++s)
    g(static_cast<Eigen::Index>(s)) =
        rho_b(static_cast<Eigen::Index>(s)) * deterministic_q_da(cmdp, dv, 0, s, policy.action(s));
  return g;
}

Vec off_policy_grad_det_reference(const FiniteStateContinuousActionMDP& cmdp,
                                  const DeterministicTabularActionPolicy& policy, const RiskParameter& beta,
                                  const Vec& rho_b, BackupMode mode) {
  if (beta.risk_neutral()) throw DomainError("reference gradient needs |beta| above the floor");
  check_policy(cmdp, policy);
  const double b = beta.beta();
  const double gamma = stage_gamma(cmdp, mode);
  const auto n = static_cast<Eigen::Index>(cmdp.n_states());

  // Z_t(s) = e^{beta r(s, mu(s))} sum_s' p(s'|s, mu(s)) Z_{t+1}(s')^gamma, Z_T = 1.
  auto backup = [&](const Vec& next_z) {
    Vec z(n);
    const Vec powered = next_z.array().pow(gamma).matrix();
    for (std::size_t s = 0; s < cmdp.n_states(); ++s) {
      const double a = policy.action(s);
      z(static_cast<Eigen::Index>(s)) = std::exp(b * cmdp.reward(s, a)) * cmdp.transition(s, a).dot(powered);
    }
    return z;
  };
  Vec next_z = Vec::Ones(n);
  if (mode == BackupMode::FiniteHorizon) {
    for (int t = cmdp.horizon() - 1; t >= 1; --t) next_z = backup(next_z);
  } else {
    for (int it = 0;; ++it) {
      Vec z = backup(next_z);
      const double residual = (z.array().log() - next_z.array().log()).abs().maxCoeff();
      next_z = std::move(z);
      if (residual < 1e-13) break;
      if (it > 200000) throw ConvergenceError("exponential recursion did not converge", residual);
    }
  }
  if (!next_z.allFinite() || (next_z.array() <= 0.0).any()) throw OverflowError("exponential recursion overflowed", 0);

  const Vec powered = next_z.array().pow(gamma).matrix();
  Vec g(n);
  for (std::size_t s = 0; s < cmdp.n_states(); ++s) {
    const auto si = static_cast<Eigen::Index>(s);
    const double a = policy.action(s);
    const Vec p = cmdp.transition(s, a);
    // Softmax Jacobian (diag(p) - p p^T) applied to the score slopes.
    const Mat jac = Mat(p.asDiagonal()) - p * p.transpose();
    const Vec dp = jac * cmdp.scores_slope().row(si).transpose();
    g(si) = rho_b(si) * (cmdp.reward_da(s, a) + dp.dot(powered) / (b * p.dot(powered)));
  }
  return g;
}

ImprovementReport improvement_check_det(const FiniteStateContinuousActionMDP& cmdp,
                                        const DeterministicTabularActionPolicy& policy, const RiskParameter& beta,
                                        const Vec& rho_b, const std::vector<double>& alpha_schedule) {
  const Vec g = off_policy_grad_det(cmdp, policy, beta, rho_b, BackupMode::Discounted);
  const Vec v0 = deterministic_values(cmdp, policy, beta, BackupMode::Discounted).stage_v.front();
  ImprovementReport rep;
  for (double alpha : alpha_schedule) {
    const Vec theta = policy.params() + alpha * g;
    if ((theta.array() < cmdp.action_low()).any() || (theta.array() > cmdp.action_high()).any()) {
      rep.min_delta.push_back(-std::numeric_limits<double>::infinity());
      continue;
    }
    const Vec v1 =
        deterministic_values(cmdp, DeterministicTabularActionPolicy(theta), beta, BackupMode::Discounted).stage_v.front();
    rep.delta_v = v1 - v0;
    const double worst = rep.delta_v.minCoeff();
    rep.min_delta.push_back(worst);
    if (worst >= -kImprovementTolerance) {
      rep.passed = true;
      rep.alpha = alpha;
      return rep;
    }
  }
  return rep;
}

}  // namespace entropic
