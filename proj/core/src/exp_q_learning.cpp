#include "entropic/exp_q_learning.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "entropic/errors.hpp"

namespace entropic {

Mat ExpQTable::q() const { return z.array().log().matrix() / beta; }

Vec ExpQTable::log_z_greedy() const {
  Vec out(z.rows());
  for (Eigen::Index s = 0; s < z.rows(); ++s)
    out(s) = std::log(z(s, static_cast<Eigen::Index>(greedy_action(z.row(s), beta))));
  return out;
}

double ExpQTable::max_abs_log_z() const { return z.array().log().abs().maxCoeff(); }

std::size_t greedy_action(const Eigen::Ref<const Eigen::RowVectorXd>& z_row, double beta) {
  if (!z_row.allFinite() || (z_row.array() <= 0.0).any()) throw NumericalError("greedy_action on a non-finite Z row");
  Eigen::Index best = 0;
  for (Eigen::Index a = 1; a < z_row.size(); ++a) {
    if (beta > 0.0 ? z_row(a) > z_row(best) : z_row(a) < z_row(best)) best = a;
  }
  return static_cast<std::size_t>(best);
}

std::size_t greedy_action(const ExpQTable& table, std::size_t s) {
  return greedy_action(table.z.row(static_cast<Eigen::Index>(s)), table.beta);
}

std::vector<std::size_t> greedy_policy(const ExpQTable& table) {
  std::vector<std::size_t> pi(static_cast<std::size_t>(table.z.rows()));
  for (std::size_t s = 0; s < pi.size(); ++s) pi[s] = greedy_action(table, s);
  return pi;
}

ExpQResult exp_q_learning(const TabularMDP& mdp, const ExpQConfig& config, Rng& rng) {
  const RiskParameter beta(config.beta);
  if (beta.risk_neutral()) throw ValidationError("exponential Q-learning needs |beta| above the floor");
  if (!(config.epsilon >= 0.0 && config.epsilon <= 1.0)) throw ValidationError("epsilon must lie in [0, 1]");
  if (!(config.step_size > 0.0 && config.step_size <= 1.0)) throw ValidationError("step_size must lie in (0, 1]");
  if (config.episodes < 0 || config.max_episode_steps < 1) throw ValidationError("episode counts must be positive");
  const double gamma = mdp.discount().value_or(1.0);
  const auto n_s = static_cast<Eigen::Index>(mdp.n_states());
  const auto n_a = static_cast<Eigen::Index>(mdp.n_actions());

  ExpQResult res;
  ExpQTable& t = res.table;
  t.beta = config.beta;
  t.z = Mat::Ones(n_s, n_a);
  t.visits = Eigen::MatrixXi::Zero(n_s, n_a);
  res.episodes.reserve(static_cast<std::size_t>(config.episodes));

  for (int ep = 0; ep < config.episodes && !t.frozen; ++ep) {
    EpisodeRecord rec;
    rec.episode = ep;
    std::size_t s = sample_categorical(mdp.initial(), rng);
    for (int step = 0; step < config.max_episode_steps; ++step) {
      const bool explore = rng.uniform() < config.epsilon;
      const std::size_t a = explore ? rng.index(mdp.n_actions()) : greedy_action(t, s);
      const TransitionSample tr = sample_transition(mdp, s, a, rng);
      double target = std::exp(config.beta * tr.reward);
      if (!tr.done) target *= std::pow(t.z(static_cast<Eigen::Index>(tr.next_state),
                                           static_cast<Eigen::Index>(greedy_action(t, tr.next_state))),
                                      gamma);
      const auto si = static_cast<Eigen::Index>(s);
      const auto ai = static_cast<Eigen::Index>(a);
      const double updated = (1.0 - config.step_size) * t.z(si, ai) + config.step_size * target;
      if (!std::isfinite(updated) || updated <= 0.0) {
        std::ostringstream os;
        os << "episode " << ep << " step " << step << ": Z(" << s << ", " << a << ") update gave " << updated
           << " (target " << target << ")";
        t.frozen = true;
        t.diagnostic = os.str();
        res.frozen_at = ep;
        break;
      }
      t.z(si, ai) = updated;
      t.visits(si, ai) += 1;
      rec.undiscounted_return += tr.reward;
      rec.length = step + 1;
      s = tr.next_state;
      if (tr.done) {
        rec.terminated = true;
        break;
      }
    }
    rec.final_state = s;
    res.episodes.push_back(rec);
  }
  return res;
}

namespace {

Mat policy_kernel(const TabularMDP& mdp, const std::vector<std::size_t>& policy) {
  const auto n = static_cast<Eigen::Index>(mdp.n_states());
  Mat m(n, n);
  for (Eigen::Index s = 0; s < n; ++s) m.row(s) = mdp.transition_row(static_cast<std::size_t>(s), policy.at(static_cast<std::size_t>(s)));
  return m;
}

}  // namespace

RiskProfile policy_risk_profile(const CliffGridWorld& grid, const std::vector<std::size_t>& policy, int rollouts,
                                Rng& rng, int max_steps) {
  const TabularMDP& mdp = grid.mdp();
  if (policy.size() != mdp.n_states()) throw ValidationError("policy length differs from n_states");
  if (rollouts < 0 || max_steps < 1) throw ValidationError("rollouts must be >= 0 and max_steps >= 1");
  RiskProfile prof;
  prof.rollouts = rollouts;

  long goal = 0, cliff = 0;
  double length = 0.0;
  for (int i = 0; i < rollouts; ++i) {
    std::size_t s = grid.start_state();
    int steps = 0;
    while (steps < max_steps && !grid.is_absorbing_cell(s)) {
      s = sample_transition(mdp, s, policy[s], rng).next_state;
      ++steps;
    }
    goal += grid.is_goal(s);
    cliff += grid.is_cliff(s);
    length += steps;
  }
  if (rollouts > 0) {
    prof.goal_rate = static_cast<double>(goal) / rollouts;
    prof.cliff_rate = static_cast<double>(cliff) / rollouts;
    prof.mean_path_length = length / rollouts;
  }

  // Absorbing cells are made sticky so mass entering them stays and can be read off.
  Mat m = policy_kernel(mdp, policy);
  const auto n = m.rows();
  std::vector<Eigen::Index> transient;
  for (Eigen::Index s = 0; s < n; ++s) {
    if (grid.is_absorbing_cell(static_cast<std::size_t>(s)) || s == static_cast<Eigen::Index>(grid.sink_state())) {
      m.row(s).setZero();
      m(s, s) = 1.0;
    } else {
      transient.push_back(s);
    }
  }
  Vec d = Vec::Zero(n);
  d(static_cast<Eigen::Index>(grid.start_state())) = 1.0;
  const Mat mt = m.transpose();
  for (int t = 0; t < max_steps; ++t) {
    double alive = 0.0;
    for (Eigen::Index s : transient) alive += d(s);
    prof.exact_mean_path_length += alive;
    d = mt * d;
  }
  for (Eigen::Index s = 0; s < n; ++s) {
    if (grid.is_goal(static_cast<std::size_t>(s))) prof.exact_goal_rate += d(s);
    if (grid.is_cliff(static_cast<std::size_t>(s))) prof.exact_cliff_rate += d(s);
  }

  const auto k = static_cast<Eigen::Index>(transient.size());
  Mat a = Mat::Identity(k, k);
  Vec b_goal = Vec::Zero(k), b_cliff = Vec::Zero(k);
  Eigen::Index start_row = -1;
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index s = transient[static_cast<std::size_t>(i)];
    if (s == static_cast<Eigen::Index>(grid.start_state())) start_row = i;
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) -= m(s, transient[static_cast<std::size_t>(j)]);
    for (Eigen::Index c = 0; c < n; ++c) {
      if (grid.is_goal(static_cast<std::size_t>(c))) b_goal(i) += m(s, c);
      if (grid.is_cliff(static_cast<std::size_t>(c))) b_cliff(i) += m(s, c);
    }
  }
  const auto lu = a.partialPivLu();
  prof.absorption_goal = lu.solve(b_goal)(start_row);
  prof.absorption_cliff = lu.solve(b_cliff)(start_row);
  prof.expected_absorption_steps = lu.solve(Vec::Ones(k))(start_row);
  return prof;
}

RiskProfile policy_risk_profile(const CliffGridWorld& grid, const ExpQTable& table, int rollouts, Rng& rng,
                                int max_steps) {
  return policy_risk_profile(grid, greedy_policy(table), rollouts, rng, max_steps);
}

Vec expected_visits(const CliffGridWorld& grid, const std::vector<std::size_t>& policy) {
  Mat m = policy_kernel(grid.mdp(), policy);
  for (Eigen::Index s = 0; s < m.rows(); ++s)
    if (grid.is_absorbing_cell(static_cast<std::size_t>(s)) || s == static_cast<Eigen::Index>(grid.sink_state()))
      m.row(s).setZero();
  Vec start = Vec::Zero(m.rows());
  start(static_cast<Eigen::Index>(grid.start_state())) = 1.0;
  return (Mat::Identity(m.rows(), m.cols()) - m.transpose()).partialPivLu().solve(start);
}

std::vector<Cell> greedy_trajectory(const CliffGridWorld& grid, const std::vector<std::size_t>& policy, Rng& rng,
                                    int max_steps) {
  std::vector<Cell> path;
  std::size_t s = grid.start_state();
  path.push_back(grid.cell(s));
  for (int t = 0; t < max_steps && !grid.is_absorbing_cell(s); ++t) {
    s = sample_transition(grid.mdp(), s, policy.at(s), rng).next_state;
    path.push_back(grid.cell(s));
  }
  return path;
}

}  // namespace entropic
