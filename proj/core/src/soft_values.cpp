#include "entropic/soft_values.hpp"

#include <cmath>
#include <sstream>

#include "entropic/errors.hpp"
#include "entropic/logmath.hpp"

namespace entropic {

namespace {

void check_policy(const TabularMDP& mdp, const StochasticTabularPolicy& policy) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions())
    throw ValidationError("policy shape does not match MDP");
}

// One backup of Q from the successor values. Terminal rows stay at zero.
Mat backup_q(const TabularMDP& mdp, const Vec& next_v, double beta, double gamma, bool neutral) {
  const auto n_s = static_cast<Eigen::Index>(mdp.n_states());
  const auto n_a = static_cast<Eigen::Index>(mdp.n_actions());
  Mat q = Mat::Zero(n_s, n_a);
  const Vec scaled = (beta * gamma) * next_v;
  for (Eigen::Index s = 0; s < n_s; ++s) {
    if (mdp.terminal(static_cast<std::size_t>(s))) continue;
    for (Eigen::Index a = 0; a < n_a; ++a) {
      const auto row = mdp.transition_matrix(static_cast<std::size_t>(a)).row(s).transpose();
      const double cont = neutral ? gamma * row.dot(next_v) : weighted_log_sum_exp(row, scaled) / beta;
      q(s, a) = mdp.reward_table()(s, a) + cont;
    }
  }
  return q;
}

Vec policy_v(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const Mat& q, double beta, bool neutral) {
  const auto n_s = q.rows();
  Vec v = Vec::Zero(n_s);
  for (Eigen::Index s = 0; s < n_s; ++s) {
    if (mdp.terminal(static_cast<std::size_t>(s))) continue;
    const auto pi = policy.probs().row(s).transpose();
    if (neutral) {
      v(s) = pi.dot(q.row(s).transpose());
    } else {
      const Vec scaled = beta * q.row(s).transpose();
      v(s) = weighted_log_sum_exp(pi, scaled) / beta;
    }
  }
  return v;
}

Vec greedy_v(const TabularMDP& mdp, const Mat& q) {
  Vec v = q.rowwise().maxCoeff();
  for (Eigen::Index s = 0; s < v.size(); ++s)
    if (mdp.terminal(static_cast<std::size_t>(s))) v(s) = 0.0;
  return v;
}

template <class VFromQ>
SoftValueTable solve_generic(const TabularMDP& mdp, double beta, bool neutral, BackupMode mode,
                             const SolveOptions& options, VFromQ v_from_q) {
  SoftValueTable table;
  table.mode = mode;
  table.beta = beta;
  table.risk_neutral = neutral;
  const auto n_s = static_cast<Eigen::Index>(mdp.n_states());
  if (mode == BackupMode::FiniteHorizon) {
    const int horizon = mdp.require_horizon();
    table.stage_v.assign(static_cast<std::size_t>(horizon) + 1, Vec::Zero(n_s));
    table.stage_q.assign(static_cast<std::size_t>(horizon), Mat());
    for (int t = horizon - 1; t >= 0; --t) {
      const auto tu = static_cast<std::size_t>(t);
      table.stage_q[tu] = backup_q(mdp, table.stage_v[tu + 1], beta, 1.0, neutral);
      table.stage_v[tu] = v_from_q(table.stage_q[tu]);
    }
    return table;
  }

  const double gamma = mdp.require_discount();
  Vec v = Vec::Zero(n_s);
  Mat q;
  double residual = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    q = backup_q(mdp, v, beta, gamma, neutral);
    Vec next = v_from_q(q);
    residual = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
    if (residual < options.tolerance) {
      table.stage_q = {q};
      table.stage_v = {v, v};
      return table;
    }
  }
  std::ostringstream os;
  os << "soft value iteration did not converge after " << options.max_iterations << " iterations (residual "
     << residual << ")";
  throw ConvergenceError(os.str(), residual);
}

void check_exp_entries(const Vec& zv, const Mat& zq) {
  for (Eigen::Index s = 0; s < zq.rows(); ++s) {
    bool bad = !(std::isfinite(zv(s)) && zv(s) > 0.0);
    for (Eigen::Index a = 0; a < zq.cols() && !bad; ++a) bad = !(std::isfinite(zq(s, a)) && zq(s, a) > 0.0);
    if (bad) {
      std::ostringstream os;
      os << "exponential value of state " << s << " left the representable range (z_v = " << zv(s) << ")";
      throw OverflowError(os.str(), static_cast<std::size_t>(s));
    }
  }
}

}  // namespace

SoftValueTable soft_value_dp(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const RiskParameter& beta,
                             BackupMode mode, const SolveOptions& options) {
  check_policy(mdp, policy);
  const bool neutral = beta.risk_neutral();
  return solve_generic(mdp, beta.beta(), neutral, mode, options,
                       [&](const Mat& q) { return policy_v(mdp, policy, q, beta.beta(), neutral); });
}

SoftValueTable risk_neutral_values(const TabularMDP& mdp, const StochasticTabularPolicy& policy, BackupMode mode,
                                   const SolveOptions& options) {
  check_policy(mdp, policy);
  return solve_generic(mdp, 0.0, true, mode, options, [&](const Mat& q) { return policy_v(mdp, policy, q, 0.0, true); });
}

ControlSolution soft_value_control(const TabularMDP& mdp, const RiskParameter& beta, BackupMode mode,
                                   const SolveOptions& options) {
  ControlSolution sol;
  sol.values = solve_generic(mdp, beta.beta(), beta.risk_neutral(), mode, options,
                             [&](const Mat& q) { return greedy_v(mdp, q); });
  const Mat& q = sol.values.q();
  sol.greedy.resize(mdp.n_states());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    Eigen::Index best = 0;
    for (Eigen::Index a = 1; a < q.cols(); ++a)
      if (q(s, a) > q(s, best)) best = a;
    sol.greedy[static_cast<std::size_t>(s)] = static_cast<std::size_t>(best);
  }
  return sol;
}

ExpValueTable exp_value_dp(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const RiskParameter& beta,
                           BackupMode mode, const SolveOptions& options) {
  check_policy(mdp, policy);
  const double b = beta.beta();
  const auto n_s = static_cast<Eigen::Index>(mdp.n_states());
  const auto n_a = static_cast<Eigen::Index>(mdp.n_actions());
  const Mat exp_r = (b * mdp.reward_table()).array().exp().matrix();

  // Z_q(s,a) = e^{beta r} E[Z_v(s')^gamma], Z_v(s) = E_pi[Z_q(s,a)], terminal rows pinned to 1.
  auto backup = [&](const Vec& next_zv, double gamma) {
    Mat zq = Mat::Ones(n_s, n_a);
    const Vec cont = gamma == 1.0 ? next_zv : Vec(next_zv.array().pow(gamma));
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
      const Vec e = mdp.transition_matrix(a) * cont;
      for (Eigen::Index s = 0; s < n_s; ++s)
        if (!mdp.terminal(static_cast<std::size_t>(s)))
          zq(s, static_cast<Eigen::Index>(a)) = exp_r(s, static_cast<Eigen::Index>(a)) * e(s);
    }
    Vec zv = policy.probs().cwiseProduct(zq).rowwise().sum();
    for (Eigen::Index s = 0; s < n_s; ++s)
      if (mdp.terminal(static_cast<std::size_t>(s))) zv(s) = 1.0;
    return std::pair<Vec, Mat>{zv, zq};
  };

  ExpValueTable table;
  table.mode = mode;
  table.beta = b;
  if (mode == BackupMode::FiniteHorizon) {
    const int horizon = mdp.require_horizon();
    table.stage_zv.assign(static_cast<std::size_t>(horizon) + 1, Vec::Ones(n_s));
    table.stage_zq.assign(static_cast<std::size_t>(horizon), Mat());
    for (int t = horizon - 1; t >= 0; --t) {
      const auto tu = static_cast<std::size_t>(t);
      auto [zv, zq] = backup(table.stage_zv[tu + 1], 1.0);
      check_exp_entries(zv, zq);
      table.stage_zv[tu] = std::move(zv);
      table.stage_zq[tu] = std::move(zq);
    }
    return table;
  }

  const double gamma = mdp.require_discount();
  Vec zv = Vec::Ones(n_s);
  double residual = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    auto [next, zq] = backup(zv, gamma);
    check_exp_entries(next, zq);
    // Relative change; equivalent to the log-domain residual scaled by |beta|.
    residual = (next.array().log() - zv.array().log()).abs().maxCoeff();
    zv = std::move(next);
    if (residual < options.tolerance * std::max(1.0, std::abs(b))) {
      table.stage_zq = {std::move(zq)};
      table.stage_zv = {zv, zv};
      return table;
    }
  }
  std::ostringstream os;
  os << "exponential value iteration did not converge (residual " << residual << ")";
  throw ConvergenceError(os.str(), residual);
}

double entropic_objective(const TabularMDP& mdp, const SoftValueTable& values) {
  const Vec& v = values.v();
  if (values.risk_neutral) return mdp.initial().dot(v);
  return weighted_log_sum_exp(mdp.initial(), Vec(values.beta * v)) / values.beta;
}

double soft_bellman_residual(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const SoftValueTable& values) {
  double worst = 0.0;
  const double gamma = values.mode == BackupMode::Discounted ? mdp.require_discount() : 1.0;
  for (std::size_t t = 0; t < values.stages(); ++t) {
    const Mat q = backup_q(mdp, values.next_v(t), values.beta, gamma, values.risk_neutral);
    const Vec v = policy_v(mdp, policy, values.stage_q[t], values.beta, values.risk_neutral);
    worst = std::max(worst, (q - values.stage_q[t]).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (v - values.stage_v[t]).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

}  // namespace entropic
