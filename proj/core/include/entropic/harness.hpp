#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "entropic/discrete_critic.hpp"
#include "entropic/envs.hpp"
#include "entropic/exp_q_learning.hpp"
#include "entropic/gridworld.hpp"
#include "entropic/metrics.hpp"
#include "entropic/rseac.hpp"

namespace entropic {

/// Settings for the gradient verification sweep.
struct VerifyConfig {
  std::vector<double> betas{-0.5, 0.5};
  /// Relative error bound for the finite-difference theorems (thm1, thm2).
  double fd_tolerance = 1e-6;
  /// Relative error bound between the off-policy gradients and their exponential recursions.
  double reference_tolerance = 1e-10;
};

struct GridworldRunConfig {
  GridWorldSpec spec;
  ExpQConfig learner;
  /// Monte Carlo rollouts for the final risk profile.
  int rollouts = 10000;
};

/// Everything one CLI invocation needs. Parsed from JSON; unknown keys are rejected.
struct ExperimentConfig {
  /// solve, gridworld, verify-gradients, train-critic or rseac.
  std::string command;
  /// Environment for rseac (pendulum-risky, pointmass-risky, bandit-risky) or train-critic (cartpole).
  std::string env;
  std::vector<std::uint64_t> seeds{0};
  int threads = 1;
  std::filesystem::path out = "runs";
  /// MDP JSON document for solve.
  std::filesystem::path mdp;
  double solve_beta = 1.0;
  DiscreteCriticConfig critic;
  RsEacConfig rseac;
  GridworldRunConfig gridworld;
  VerifyConfig verify;
  PointMassSpec pointmass;
  double pendulum_sigma = 1.0;
  double pendulum_threshold = 0.01;
  double bandit_safe = 1.0;
  double bandit_mean = 1.0;
  double bandit_sigma = 2.0;

  /// Throws ValidationError for an unknown command, empty threads or inconsistent settings.
  void validate() const;
};

const std::vector<std::string>& command_names();

/// Defaults for a command: train-critic runs cartpole, rseac runs pointmass-risky.
ExperimentConfig default_config(const std::string& command);
/// Overlay a JSON document on the command's defaults. Throws ValidationError naming the first
/// unknown or mistyped key.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Command-line overrides; unset fields leave the config untouched. beta and steps reach every
/// algorithm section, episodes reaches the gridworld learner.
struct ConfigOverrides {
  std::optional<double> beta;
  std::optional<long> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> env;
  std::optional<std::string> mode;
  std::optional<std::filesystem::path> out;
  std::optional<int> episodes;
  std::optional<int> threads;
};
void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

/// 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

std::unique_ptr<ContinuousEnv> make_env(const ExperimentConfig& config);

/// Run fn(seed) for every seed on up to `threads` workers and return the results in seed order.
/// The first exception thrown by any worker is rethrown after all workers join.
std::vector<MetricsLog> run_seeds(const std::vector<std::uint64_t>& seeds, int threads,
                                  const std::function<MetricsLog(std::uint64_t)>& fn);

/// Per-step mean and population std (ddof 0) over runs, restricted to the steps every run
/// recorded. Columns: <name>_mean, <name>_std for each input column, then n_runs.
MetricsLog aggregate(const std::vector<MetricsLog>& runs);

struct VerifyRow {
  std::uint64_t seed = 0;
  std::string theorem;
  double beta = 0.0;
  /// Not a number for the improvement checks, which only report pass or fail.
  double relative_error = 0.0;
  bool pass = false;
};

/// For each seed and beta: thm1 and thm2 against central differences, eq12-det and a4-stoch
/// against their exponential recursions, thm3 and thm3.4 improvement checks.
std::vector<VerifyRow> verify_gradients(const std::vector<std::uint64_t>& seeds, const VerifyConfig& config);
void write_verify_csv(std::ostream& out, const std::vector<VerifyRow>& rows);

/// One-line summaries and file names written by run().
struct RunReport {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> lines;
  /// Set when any seed aborted on a numerical failure.
  bool numerical_abort = false;
};

/// Execute the configured command and write its CSV outputs under config.out.
RunReport run(const ExperimentConfig& config);

}  // namespace entropic
