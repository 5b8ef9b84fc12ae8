// entropic-rl: command line front end for the experiment harness.
//
//   entropic-rl <solve|gridworld|verify-gradients|train-critic|rseac> [--config file] [overrides]
//
// Exit status: 0 on success, 2 on invalid input, 3 when a run aborted on a numerical failure.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "entropic/errors.hpp"
#include "entropic/harness.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config;
  std::optional<double> beta;
  std::optional<long> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> env;
  std::optional<std::string> mode;
  std::optional<std::string> out;
  std::optional<std::string> mdp;
  std::optional<int> episodes;
  std::optional<int> threads;
  std::vector<std::uint64_t> seeds;
  bool print_config = false;
};

void add_flags(CLI::App* cmd, Flags& f, bool with_mode, bool with_env) {
  cmd->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("--beta", f.beta, "Risk parameter");
  cmd->add_option("--seed", f.seed, "Single seed (replaces the config's seed list)");
  cmd->add_option("--seeds", f.seeds, "Seed list (replaces the config's seed list)");
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--threads", f.threads, "Worker threads across seeds")->check(CLI::PositiveNumber);
  cmd->add_flag("--print-config", f.print_config, "Print the resolved config as JSON and exit");
  if (with_env) {
    cmd->add_option("--env", f.env, "Environment");
    cmd->add_option("--steps", f.steps, "Environment steps")->check(CLI::PositiveNumber);
  }
  if (with_mode) cmd->add_option("--mode", f.mode, "stabilized, unstable or risk-neutral");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-sensitive RL experiments with the entropic risk measure"};
  app.require_subcommand(1);
  Flags f;

  auto* solve = app.add_subcommand("solve", "Risk-sensitive optimal values of an MDP JSON document");
  add_flags(solve, f, false, false);
  solve->add_option("--mdp", f.mdp, "MDP JSON document")->check(CLI::ExistingFile);

  auto* grid = app.add_subcommand("gridworld", "Exponential Q-learning on the cliff gridworld");
  add_flags(grid, f, false, false);
  grid->add_option("--episodes", f.episodes, "Training episodes")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify-gradients", "Check the policy gradient theorems on random instances");
  add_flags(verify, f, false, false);

  auto* critic = app.add_subcommand("train-critic", "Train a discrete-action critic on CartPole");
  add_flags(critic, f, true, true);

  auto* rseac = app.add_subcommand("rseac", "Train rsEAC on a continuous-action environment");
  add_flags(rseac, f, false, true);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    entropic::ExperimentConfig cfg =
        f.config.empty() ? entropic::default_config(command) : entropic::load_config(f.config);
    if (cfg.command != command)
      throw entropic::ValidationError("config is for '" + cfg.command + "', not '" + command + "'");
    entropic::ConfigOverrides o;
    o.beta = f.beta;
    o.steps = f.steps;
    o.seed = f.seed;
    o.env = f.env;
    o.mode = f.mode;
    if (f.out) o.out = *f.out;
    o.episodes = f.episodes;
    o.threads = f.threads;
    entropic::apply_overrides(cfg, o);
    if (!f.seeds.empty()) cfg.seeds = f.seeds;
    if (f.mdp) cfg.mdp = *f.mdp;
    if (f.print_config) {
      std::cout << entropic::to_json(cfg).dump(2) << '\n';
      return 0;
    }

    const auto report = entropic::run(cfg);
    for (const auto& line : report.lines) std::cout << line << '\n';
    for (const auto& file : report.files) std::cout << "wrote " << file.string() << '\n';
    return report.numerical_abort ? kExitNumerical : 0;
  } catch (const entropic::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const entropic::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const entropic::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const entropic::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
