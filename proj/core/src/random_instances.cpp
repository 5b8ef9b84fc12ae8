#include "entropic/random_instances.hpp"

#include <cmath>

namespace entropic {

Vec random_distribution(Rng& rng, std::size_t n) {
  Vec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = -std::log1p(-rng.uniform());
  return v / v.sum();
}

TabularMDP random_tabular_mdp(Rng& rng, std::size_t n_states, std::size_t n_actions, int horizon,
                              std::optional<double> discount) {
  const auto ns = static_cast<Eigen::Index>(n_states);
  std::vector<Mat> transition(n_actions, Mat(ns, ns));
  Mat reward(ns, static_cast<Eigen::Index>(n_actions));
  for (Eigen::Index s = 0; s < ns; ++s)
    for (std::size_t a = 0; a < n_actions; ++a) {
      transition[a].row(s) = random_distribution(rng, n_states).transpose();
      reward(s, static_cast<Eigen::Index>(a)) = rng.uniform(-1.0, 1.0);
    }
  Vec initial = random_distribution(rng, n_states);
  return TabularMDP(std::move(transition), std::move(reward), std::move(initial), std::vector<bool>(n_states, false),
                    horizon, discount);
}

Mat random_logits(Rng& rng, std::size_t n_states, std::size_t n_actions, double scale) {
  Mat m(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_actions));
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.uniform(-scale, scale);
  return m;
}

FiniteStateContinuousActionMDP random_cmdp(Rng& rng, std::size_t n_states, int horizon,
                                           std::optional<double> discount) {
  const auto n = static_cast<Eigen::Index>(n_states);
  Mat u(n, n), w(n, n);
  Vec c0(n), c1(n), c2(n);
  for (Eigen::Index i = 0; i < n * n; ++i) u(i) = rng.uniform(-1.0, 1.0);
  for (Eigen::Index i = 0; i < n * n; ++i) w(i) = rng.uniform(-1.0, 1.0);
  for (Eigen::Index s = 0; s < n; ++s) {
    c0(s) = rng.uniform(-1.0, 1.0);
    c1(s) = rng.uniform(-1.0, 1.0);
    c2(s) = -rng.uniform(0.25, 1.0);
  }
  Vec initial = random_distribution(rng, n_states);
  return FiniteStateContinuousActionMDP(std::move(u), std::move(w), std::move(c0), std::move(c1), std::move(c2),
                                        std::move(initial), horizon, discount);
}

DeterministicTabularActionPolicy random_action_policy(Rng& rng, std::size_t n_states) {
  Vec theta(static_cast<Eigen::Index>(n_states));
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = rng.uniform(-1.0, 1.0);
  return DeterministicTabularActionPolicy(std::move(theta));
}

}  // namespace entropic
