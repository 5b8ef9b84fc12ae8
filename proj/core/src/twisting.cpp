#include "entropic/twisting.hpp"

#include <Eigen/LU>

#include "entropic/errors.hpp"
#include "entropic/logmath.hpp"

namespace entropic {

namespace {

void check_normalized(const Vec& v, const char* what) {
  if (!v.allFinite() || std::abs(v.sum() - 1.0) > kRowTolerance)
    throw NumericalError(std::string("twisted ") + what + " failed to normalize");
}

// Twisted transitions for one stage given the exponent applied to successor values.
std::vector<Mat> twist_dynamics(const TabularMDP& mdp, const Vec& exponent) {
  std::vector<Mat> out;
  out.reserve(mdp.n_actions());
  for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
    const Mat& p = mdp.transition_matrix(a);
    Mat ps(p.rows(), p.cols());
    for (Eigen::Index s = 0; s < p.rows(); ++s) {
      const Vec row = twisted_weights(p.row(s).transpose(), exponent);
      check_normalized(row, "transition row");
      ps.row(s) = row.transpose();
    }
    out.push_back(std::move(ps));
  }
  return out;
}

Mat twist_policy(const StochasticTabularPolicy& policy, const Mat& q, double beta) {
  Mat out(q.rows(), q.cols());
  for (Eigen::Index s = 0; s < q.rows(); ++s) {
    const Vec row = twisted_weights(policy.probs().row(s).transpose(), Vec(beta * q.row(s).transpose()));
    check_normalized(row, "policy row");
    out.row(s) = row.transpose();
  }
  return out;
}

// State-to-state kernel M(s, s') = sum_a pi(a|s) p(s'|s,a).
Mat kernel(const std::vector<Mat>& p, const Mat& pi) {
  Mat m = Mat::Zero(pi.rows(), pi.rows());
  for (std::size_t a = 0; a < p.size(); ++a) m += pi.col(static_cast<Eigen::Index>(a)).asDiagonal() * p[a];
  return m;
}

Vec discounted_occupancy(const Mat& m, const Vec& start, double gamma) {
  const Mat lhs = Mat::Identity(m.rows(), m.cols()) - gamma * m.transpose();
  return lhs.partialPivLu().solve(start);
}

}  // namespace

TwistedModel twist(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const SoftValueTable& values) {
  if (policy.n_states() != mdp.n_states() || policy.n_actions() != mdp.n_actions())
    throw ValidationError("policy shape does not match MDP");
  if (values.stage_q.empty()) throw ValidationError("twist requires a solved value table");
  const double beta = values.effective_beta();
  const double gamma = values.mode == BackupMode::Discounted ? mdp.require_discount() : 1.0;

  TwistedModel tm;
  tm.mode = values.mode;
  tm.p1_star = twisted_weights(mdp.initial(), Vec(beta * values.v()));
  check_normalized(tm.p1_star, "initial distribution");
  for (std::size_t t = 0; t < values.stages(); ++t) {
    tm.stage_p_star.push_back(twist_dynamics(mdp, Vec(beta * gamma * values.next_v(t))));
    tm.stage_pi_star.push_back(twist_policy(policy, values.stage_q[t], beta));
  }

  if (values.mode == BackupMode::Discounted) {
    tm.rho_star = discounted_occupancy(kernel(tm.p_star(), tm.pi_star()), tm.p1_star, gamma);
    tm.stage_rho = {tm.rho_star};
    return tm;
  }
  tm.stage_rho.push_back(tm.p1_star);
  for (std::size_t t = 0; t < values.stages(); ++t)
    tm.stage_rho.push_back(kernel(tm.stage_p_star[t], tm.stage_pi_star[t]).transpose() * tm.stage_rho.back());
  tm.rho_star = Vec::Zero(static_cast<Eigen::Index>(mdp.n_states()));
  for (const Vec& d : tm.stage_rho) tm.rho_star += d;
  return tm;
}

std::vector<Vec> state_distributions(const TabularMDP& mdp, const StochasticTabularPolicy& policy, BackupMode mode) {
  std::vector<Mat> p;
  for (std::size_t a = 0; a < mdp.n_actions(); ++a) p.push_back(mdp.transition_matrix(a));
  const Mat m = kernel(p, policy.probs());
  if (mode == BackupMode::Discounted) return {discounted_occupancy(m, mdp.initial(), mdp.require_discount())};
  const int horizon = mdp.require_horizon();
  std::vector<Vec> d{mdp.initial()};
  for (int t = 0; t < horizon; ++t) d.push_back(m.transpose() * d.back());
  return d;
}

}  // namespace entropic
