#pragma once

#include <cstddef>
#include <vector>

#include "entropic/mdp.hpp"

namespace entropic {

struct SolveOptions {
  int max_iterations = 200000;
  double tolerance = 1e-12;
};

/// Soft value functions V^beta, Q^beta (reward units).
///
/// Finite-horizon tables are stage-indexed: stage_q[t] is Q at step t+1 with
/// T-t steps to go, stage_v has T+1 entries and stage_v[T] == 0. A discounted
/// table has a single stationary stage (and stage_v[1] mirrors stage_v[0]).
struct SoftValueTable {
  BackupMode mode = BackupMode::FiniteHorizon;
  double beta = 0.0;
  /// True when |beta| was below the floor and the table holds risk-neutral expectations.
  bool risk_neutral = false;
  std::vector<Vec> stage_v;
  std::vector<Mat> stage_q;

  const Vec& v() const { return stage_v.front(); }
  const Mat& q() const { return stage_q.front(); }
  /// beta, or 0 for a risk-neutral table (so exp(beta x) weights become uniform).
  double effective_beta() const noexcept { return risk_neutral ? 0.0 : beta; }
  std::size_t stages() const noexcept { return stage_q.size(); }
  /// Value of the state reached after stage t (stage t+1, or the stationary table).
  const Vec& next_v(std::size_t t) const { return mode == BackupMode::Discounted ? stage_v.front() : stage_v.at(t + 1); }
};

/// Exponential value functions Z = exp(beta V), Z(s,a) = exp(beta Q).
struct ExpValueTable {
  BackupMode mode = BackupMode::FiniteHorizon;
  double beta = 0.0;
  std::vector<Vec> stage_zv;
  std::vector<Mat> stage_zq;

  const Vec& z_v() const { return stage_zv.front(); }
  const Mat& z_q() const { return stage_zq.front(); }
};

/// Exact soft policy evaluation. Finite horizon uses backward recursion over
/// mdp.horizon(); discounted iterates Q = r + (1/beta) log E[exp(beta gamma V')]
/// to a sup-norm residual below options.tolerance. All expectations of
/// exponentials go through log-sum-exp.
SoftValueTable soft_value_dp(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const RiskParameter& beta,
                             BackupMode mode, const SolveOptions& options = {});

/// Same recursion in the exponential domain. Any entry that overflows to inf or
/// underflows to 0 raises OverflowError naming the state.
ExpValueTable exp_value_dp(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const RiskParameter& beta,
                           BackupMode mode, const SolveOptions& options = {});

/// Risk-neutral expected-return tables in the same stage layout (beta = 0).
SoftValueTable risk_neutral_values(const TabularMDP& mdp, const StochasticTabularPolicy& policy, BackupMode mode,
                                   const SolveOptions& options = {});

struct ControlSolution {
  SoftValueTable values;
  /// Greedy action per state at the first stage (argmax of Q^beta, lowest index on ties).
  std::vector<std::size_t> greedy;
};

/// Risk-sensitive optimal control: V = max_a Q^beta.
ControlSolution soft_value_control(const TabularMDP& mdp, const RiskParameter& beta, BackupMode mode,
                                   const SolveOptions& options = {});

/// J^beta = (1/beta) log sum_s p1(s) exp(beta V(s)); the p1-mean of V when risk-neutral.
double entropic_objective(const TabularMDP& mdp, const SoftValueTable& values);

/// Largest violation of the two soft Bellman relations over all stages and (s, a).
double soft_bellman_residual(const TabularMDP& mdp, const StochasticTabularPolicy& policy, const SoftValueTable& values);

}  // namespace entropic
