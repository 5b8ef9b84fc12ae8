#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <gtest/gtest.h>

#include "entropic/errors.hpp"
#include "entropic/harness.hpp"
#include "entropic/mdp_json.hpp"

using namespace entropic;
using nlohmann::json;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("entropic_harness_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::string error_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

MetricsLog toy_log(std::vector<long> steps, double offset) {
  MetricsLog log({"a", "b"});
  for (long s : steps) log.add(s, {offset + static_cast<double>(s), offset * offset});
  return log;
}

ExperimentConfig tiny_gridworld(const std::filesystem::path& out) {
  auto c = parse_config(json{{"command", "gridworld"},
                             {"seeds", {3, 4}},
                             {"threads", 2},
                             {"out", out.string()},
                             {"gridworld", {{"episodes", 300}, {"beta", -1.0}, {"rollouts", 50}}}});
  return c;
}

}  // namespace

TEST(Config, DefaultsPerCommand) {
  EXPECT_EQ(parse_config(json{{"command", "train-critic"}}).env, "cartpole");
  EXPECT_EQ(parse_config(json{{"command", "rseac"}}).env, "pointmass-risky");
  const auto c = parse_config(json{{"command", "rseac"}, {"rseac", {{"beta", -1.0}, {"critic_hidden", {32, 32}}}}});
  EXPECT_EQ(c.rseac.beta, -1.0);
  EXPECT_EQ(c.rseac.critic_hidden, (std::vector<int>{32, 32}));
  EXPECT_EQ(c.rseac.policy_noise, 0.2);
}

TEST(Config, UnknownKeysAreNamed) {
  EXPECT_NE(error_of(json{{"command", "rseac"}, {"betta", 1.0}}).find("'betta'"), std::string::npos);
  EXPECT_NE(error_of(json{{"command", "rseac"}, {"rseac", {{"tau", 0.1}, {"delay", 2}}}}).find("'rseac.delay'"),
            std::string::npos);
  EXPECT_NE(error_of(json{{"command", "train-critic"}, {"critic", {{"beta", "high"}}}}).find("'critic.beta'"),
            std::string::npos);
  EXPECT_FALSE(error_of(json{{"beta", 1.0}}).empty());
  EXPECT_FALSE(error_of(json{{"command", "train-critic"}, {"critic", {{"mode", "fast"}}}}).empty());
}

TEST(Config, JsonRoundTripKeepsHash) {
  auto c = parse_config(json{{"command", "gridworld"}, {"gridworld", {{"cliff", {{2, 9}, {3, 9}}}, {"slip", 0.1}}}});
  const auto back = parse_config(to_json(c));
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(back.gridworld.spec.cliff.size(), 2u);
  EXPECT_EQ(config_hash(c).size(), 16u);
  c.gridworld.learner.beta = 0.5;
  EXPECT_NE(config_hash(c), config_hash(back));
}

TEST(Config, OverridesReachEverySection) {
  auto c = default_config("rseac");
  ConfigOverrides o;
  o.beta = -2.0;
  o.steps = 1234;
  o.seed = 9;
  o.mode = "unstable";
  o.episodes = 77;
  apply_overrides(c, o);
  EXPECT_EQ(c.rseac.beta, -2.0);
  EXPECT_EQ(c.critic.beta, -2.0);
  EXPECT_EQ(c.gridworld.learner.beta, -2.0);
  EXPECT_EQ(c.rseac.steps, 1234);
  EXPECT_EQ(c.critic.steps, 1234);
  EXPECT_EQ(c.seeds, std::vector<std::uint64_t>{9});
  EXPECT_EQ(c.critic.mode, CriticMode::Unstable);
  EXPECT_EQ(c.gridworld.learner.episodes, 77);
}

TEST(Config, ValidationCatchesBadCombinations) {
  auto c = default_config("train-critic");
  c.env = "pointmass-risky";
  EXPECT_THROW(c.validate(), ValidationError);
  c = default_config("rseac");
  c.env = "cartpole";
  EXPECT_THROW(c.validate(), ValidationError);
  c = default_config("solve");
  EXPECT_THROW(c.validate(), ValidationError);
  c = default_config("fly");
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Aggregate, MeanAndPopulationStd) {
  const auto agg = aggregate({toy_log({1, 2, 3}, 0.0), toy_log({1, 2, 3}, 2.0)});
  ASSERT_EQ(agg.size(), 3u);
  EXPECT_EQ(agg.columns(), (std::vector<std::string>{"a_mean", "a_std", "b_mean", "b_std", "n_runs"}));
  EXPECT_DOUBLE_EQ(agg.column("a_mean")[1], 3.0);
  EXPECT_DOUBLE_EQ(agg.column("a_std")[1], 1.0);
  EXPECT_DOUBLE_EQ(agg.column("b_mean")[0], 2.0);
  EXPECT_DOUBLE_EQ(agg.column("b_std")[0], 2.0);
  EXPECT_EQ(agg.column("n_runs")[2], 2.0);
}

TEST(Aggregate, IdenticalRunsHaveZeroStd) {
  const auto agg = aggregate({toy_log({5, 10}, 1.5), toy_log({5, 10}, 1.5), toy_log({5, 10}, 1.5)});
  for (double s : agg.column("a_std")) EXPECT_EQ(s, 0.0);
  for (double s : agg.column("b_std")) EXPECT_EQ(s, 0.0);
}

TEST(Aggregate, KeepsOnlyCommonSteps) {
  const auto agg = aggregate({toy_log({1, 2, 3, 4}, 0.0), toy_log({2, 4}, 0.0)});
  ASSERT_EQ(agg.size(), 2u);
  EXPECT_EQ(agg.records()[0].step, 2);
  EXPECT_EQ(agg.records()[1].step, 4);
  EXPECT_THROW(aggregate({}), ValidationError);
  EXPECT_THROW(aggregate({toy_log({1}, 0.0), MetricsLog({"z"})}), ValidationError);
}

TEST(RunSeeds, KeepsSeedOrderAcrossThreads) {
  const std::vector<std::uint64_t> seeds{5, 1, 9, 2, 7};
  const auto logs = run_seeds(seeds, 3, [](std::uint64_t s) {
    MetricsLog log({"seed"});
    log.add(1, {static_cast<double>(s)});
    return log;
  });
  ASSERT_EQ(logs.size(), seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) EXPECT_EQ(logs[i].column("seed")[0], static_cast<double>(seeds[i]));
}

TEST(RunSeeds, RethrowsWorkerFailure) {
  const auto fn = [](std::uint64_t s) -> MetricsLog {
    if (s == 2) throw NumericalError("seed 2 diverged");
    return MetricsLog({"x"});
  };
  EXPECT_THROW(run_seeds({1, 2, 3}, 2, fn), NumericalError);
  EXPECT_TRUE(run_seeds({}, 4, fn).empty());
}

TEST(VerifyGradients, TheoremsHoldOnSeededInstances) {
  VerifyConfig cfg;
  const auto rows = verify_gradients({0, 1, 2}, cfg);
  ASSERT_EQ(rows.size(), 3u * 2u * 6u);
  for (const auto& r : rows) {
    if (r.theorem == "thm1" || r.theorem == "thm2") EXPECT_TRUE(r.pass) << r.theorem << " seed " << r.seed;
    if (r.theorem == "eq12-det" || r.theorem == "a4-stoch") EXPECT_LE(r.relative_error, 1e-10);
    if (r.theorem.rfind("thm3", 0) == 0) EXPECT_TRUE(std::isnan(r.relative_error));
  }
  std::ostringstream os;
  write_verify_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "seed,theorem,beta,relative_error,pass");
  EXPECT_TRUE(verify_gradients({}, cfg).empty());
}

TEST(Run, EmptyVerifySweepIsNoOp) {
  const auto dir = scratch_dir("verify");
  auto c = default_config("verify-gradients");
  c.seeds.clear();
  c.out = dir;
  const auto rep = run(c);
  EXPECT_FALSE(rep.numerical_abort);
  EXPECT_EQ(read_lines(dir / "verify_gradients.csv").size(), 1u);
  std::filesystem::remove_all(dir);
}

TEST(Run, GridworldFilesMatchSchemaAndAggregate) {
  const auto dir = scratch_dir("gridworld");
  const auto c = tiny_gridworld(dir);
  const auto rep = run(c);
  ASSERT_FALSE(rep.numerical_abort);

  std::vector<MetricsLog> per_seed;
  for (std::uint64_t s : c.seeds) {
    const std::string stem = "gridworld_seed" + std::to_string(s);
    per_seed.push_back(MetricsLog::read_csv(dir / (stem + ".csv")));
    EXPECT_EQ(per_seed.back().columns(), (std::vector<std::string>{"return", "length", "terminated", "cliff"}));
    EXPECT_EQ(per_seed.back().size(), 300u);

    const auto grid = read_lines(dir / (stem + "_logz.csv"));
    ASSERT_EQ(grid.size(), 11u);
    EXPECT_EQ(grid[0], "c0,c1,c2,c3,c4,c5,c6,c7,c8,c9");
    const auto traj = read_lines(dir / (stem + "_trajectory.csv"));
    ASSERT_GE(traj.size(), 2u);
    EXPECT_EQ(traj[0], "t,x,y");
    EXPECT_EQ(traj[1], "0,0,9");

    std::ifstream meta(dir / (stem + ".meta.json"));
    const auto j = json::parse(meta);
    EXPECT_EQ(j.at("seed"), s);
    EXPECT_EQ(j.at("config_hash"), config_hash(c));
    EXPECT_TRUE(std::filesystem::exists(dir / (stem + "_profile.json")));
  }

  const auto agg = MetricsLog::read_csv(dir / "gridworld_aggregate.csv");
  ASSERT_EQ(agg.size(), 300u);
  for (std::size_t i = 0; i < agg.size(); ++i) {
    const double a = per_seed[0].records()[i].values[0], b = per_seed[1].records()[i].values[0];
    EXPECT_NEAR(agg.records()[i].values[0], 0.5 * (a + b), 1e-12);
    EXPECT_NEAR(agg.records()[i].values[1], 0.5 * std::fabs(a - b), 1e-12);
  }
  std::filesystem::remove_all(dir);
}

TEST(Run, RerunIsReproducible) {
  const auto d1 = scratch_dir("rerun1"), d2 = scratch_dir("rerun2");
  auto c = parse_config(json{{"command", "rseac"},
                             {"env", "bandit-risky"},
                             {"seeds", {1}},
                             {"rseac",
                              {{"steps", 400},
                               {"warmup", 100},
                               {"epoch", 100},
                               {"batch", 16},
                               {"actor_hidden", {8}},
                               {"critic_hidden", {8}},
                               {"eval_episodes", 3}}}});
  c.out = d1;
  run(c);
  c.out = d2;
  run(c);
  EXPECT_EQ(read_lines(d1 / "rseac_seed1.csv"), read_lines(d2 / "rseac_seed1.csv"));
  const auto log = MetricsLog::read_csv(d1 / "rseac_seed1.csv");
  EXPECT_EQ(log.columns(), rseac_log_columns());
  EXPECT_EQ(log.size(), 4u);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST(Run, CriticRunWritesBatchHistogram) {
  const auto dir = scratch_dir("critic");
  auto c = parse_config(json{{"command", "train-critic"},
                             {"out", dir.string()},
                             {"critic",
                              {{"steps", 600},
                               {"warmup", 200},
                               {"epoch", 200},
                               {"batch", 16},
                               {"hidden", {8}},
                               {"eval_episodes", 2}}}});
  run(c);
  EXPECT_EQ(MetricsLog::read_csv(dir / "train-critic_seed0.csv").columns(), critic_log_columns());
  const auto hist = read_lines(dir / "train-critic_seed0_batch.csv");
  ASSERT_EQ(hist.size(), 17u);
  EXPECT_EQ(hist[0], "sample,m,m_minus_z,clipped");
  std::filesystem::remove_all(dir);
}

TEST(Run, SolveAndVerifyFilesMatchSchema) {
  const auto dir = scratch_dir("solve");
  std::filesystem::create_directories(dir);
  // Two states, two actions, T = 1: from state 0 action 0 pays 1 for sure, action 1 pays 0.
  const TabularMDP mdp({Mat::Identity(2, 2), Mat::Identity(2, 2)}, (Mat(2, 2) << 1.0, 0.0, 0.0, 0.0).finished(),
                       (Vec(2) << 1.0, 0.0).finished(), {false, false}, 1, std::nullopt);
  {
    std::ofstream f(dir / "mdp.json");
    f << mdp_to_json(mdp).dump();
  }
  auto c = default_config("solve");
  c.mdp = dir / "mdp.json";
  c.out = dir;
  c.solve_beta = -0.5;
  const auto rep = run(c);
  ASSERT_EQ(rep.lines.size(), 1u);
  const auto lines = read_lines(dir / "solve.csv");
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "state,v,greedy,q0,q1");
  EXPECT_EQ(lines[1], "0,1,0,1,0");

  auto v = default_config("verify-gradients");
  v.seeds = {0, 1};
  v.out = dir;
  run(v);
  const auto rows = read_lines(dir / "verify_gradients.csv");
  ASSERT_EQ(rows.size(), 1u + 2 * v.verify.betas.size() * 6);
  EXPECT_EQ(rows[0], "seed,theorem,beta,relative_error,pass");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::stringstream ss(rows[i]);
    std::vector<std::string> cells;
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    ASSERT_EQ(cells.size(), 5u) << rows[i];
    EXPECT_EQ(cells[4], "1") << rows[i];
  }
  std::filesystem::remove_all(dir);
}
