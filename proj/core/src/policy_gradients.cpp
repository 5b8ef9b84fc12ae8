#include "entropic/policy_gradients.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "entropic/errors.hpp"

namespace entropic {

namespace {

void check_rho(const Vec& rho_b, std::size_t n_states) {
  if (rho_b.size() != static_cast<Eigen::Index>(n_states)) throw ValidationError("rho_b length differs from n_states");
  if ((rho_b.array() < 0.0).any() || std::abs(rho_b.sum() - 1.0) > 1e-9)
    throw ValidationError("rho_b must be a non-negative distribution");
}

// d J / d theta(s, b) = sum_a d pi(a|s)/d theta(s,b) * h(s, a) with
// d pi(a|s)/d theta(s,b) = pi(a|s) (delta_ab - pi(b|s)).
Mat softmax_chain(const Mat& pi, const Mat& h) {
  Mat g(pi.rows(), pi.cols());
  for (Eigen::Index s = 0; s < pi.rows(); ++s) {
    const double mean = pi.row(s).dot(h.row(s));
    for (Eigen::Index b = 0; b < pi.cols(); ++b) g(s, b) = pi(s, b) * (h(s, b) - mean);
  }
  return g;
}

}  // namespace

double softmax_objective(const TabularMDP& mdp, const Mat& logits, const RiskParameter& beta, BackupMode mode) {
  const auto policy = StochasticTabularPolicy::softmax(logits);
  return entropic_objective(mdp, soft_value_dp(mdp, policy, beta, mode));
}

Mat stochastic_pg_thm1(const TabularMDP& mdp, const Mat& logits, const RiskParameter& beta, BackupMode mode) {
  if (beta.risk_neutral()) return risk_neutral_pg(mdp, logits, mode);
  const auto policy = StochasticTabularPolicy::softmax(logits);
  const SoftValueTable values = soft_value_dp(mdp, policy, beta, mode);
  const TwistedModel tm = twist(mdp, policy, values);
  const double b = beta.beta();
  Mat grad = Mat::Zero(logits.rows(), logits.cols());
  for (std::size_t t = 0; t < values.stages(); ++t) {
    // expm1 keeps small exponents accurate; the -1 vanishes because sum_a d pi = 0.
    Mat h(logits.rows(), logits.cols());
    for (Eigen::Index s = 0; s < h.rows(); ++s)
      for (Eigen::Index a = 0; a < h.cols(); ++a)
        h(s, a) = std::expm1(b * (values.stage_q[t](s, a) - values.stage_v[t](s))) / b;
    grad += tm.stage_rho[t].asDiagonal() * softmax_chain(policy.probs(), h);
  }
  return grad;
}

Mat risk_neutral_pg(const TabularMDP& mdp, const Mat& logits, BackupMode mode) {
  const auto policy = StochasticTabularPolicy::softmax(logits);
  const SoftValueTable values = risk_neutral_values(mdp, policy, mode);
  const auto d = state_distributions(mdp, policy, mode);
  Mat grad = Mat::Zero(logits.rows(), logits.cols());
  for (std::size_t t = 0; t < values.stages(); ++t)
    grad += d[t].asDiagonal() * softmax_chain(policy.probs(), values.stage_q[t]);
  return grad;
}

Mat off_policy_grad_stoch(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const RiskParameter& beta,
                          const Vec& rho_b, BackupMode mode) {
  check_rho(rho_b, mdp.n_states());
  if (beta.risk_neutral()) throw DomainError("off-policy risk-sensitive gradient needs |beta| above the floor");
  const SoftValueTable values = soft_value_dp(mdp, policy, beta, mode);
  const double b = beta.beta();
  return (rho_b.asDiagonal() * (b * values.q()).array().exp().matrix()) / b;
}

Mat off_policy_grad_stoch_reference(const TabularMDP& mdp, const StochasticTabularPolicy& policy,
                                    const RiskParameter& beta, const Vec& rho_b, BackupMode mode) {
  check_rho(rho_b, mdp.n_states());
  if (beta.risk_neutral()) throw DomainError("off-policy risk-sensitive gradient needs |beta| above the floor");
  const ExpValueTable z = exp_value_dp(mdp, policy, beta, mode);
  Mat g = z.z_q();
  for (Eigen::Index s = 0; s < g.rows(); ++s) g.row(s) *= rho_b(s) / beta.beta();
  return g;
}

Mat risk_neutral_off_policy_grad_stoch(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const Vec& rho_b,
                                       BackupMode mode) {
  check_rho(rho_b, mdp.n_states());
  return rho_b.asDiagonal() * risk_neutral_values(mdp, policy, mode).q();
}

Vec project_to_simplex(const Vec& v) {
  const Eigen::Index n = v.size();
  if (n == 0) throw ValidationError("cannot project an empty vector");
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cumsum += u[static_cast<std::size_t>(j)];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - t > 0.0) theta = t;
  }
  Vec out = (v.array() - theta).max(0.0).matrix();
  return out / out.sum();
}

std::vector<double> default_alpha_schedule() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}; }

ImprovementReport improvement_check_stoch(const TabularMDP& mdp, const StochasticTabularPolicy& policy,
                                          const RiskParameter& beta, const Vec& rho_b,
                                          const std::vector<double>& alpha_schedule) {
  const Mat g = off_policy_grad_stoch(mdp, policy, beta, rho_b, BackupMode::Discounted);
  const Vec v0 = soft_value_dp(mdp, policy, beta, BackupMode::Discounted).v();
  ImprovementReport rep;
  for (double alpha : alpha_schedule) {
    const Mat raw = policy.probs() + alpha * g;
    Mat projected(raw.rows(), raw.cols());
    bool inside = true;
    for (Eigen::Index s = 0; s < raw.rows(); ++s) {
      inside = inside && (raw.row(s).array() >= 0.0).all() && std::abs(raw.row(s).sum() - 1.0) <= kRowTolerance;
      projected.row(s) = project_to_simplex(raw.row(s).transpose()).transpose();
    }
    const Vec v1 = soft_value_dp(mdp, StochasticTabularPolicy(projected), beta, BackupMode::Discounted).v();
    rep.delta_v = v1 - v0;
    const double worst = rep.delta_v.minCoeff();
    rep.min_delta.push_back(worst);
    if (worst >= -kImprovementTolerance) {
      rep.passed = true;
      rep.alpha = alpha;
      rep.unprojected_passed = inside;
      return rep;
    }
  }
  return rep;
}

}  // namespace entropic
