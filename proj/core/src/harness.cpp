#include "entropic/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "entropic/continuous_action_mdp.hpp"
#include "entropic/enumerate.hpp"
#include "entropic/errors.hpp"
#include "entropic/finite_difference.hpp"
#include "entropic/mdp_json.hpp"
#include "entropic/policy_gradients.hpp"
#include "entropic/random_instances.hpp"
#include "entropic/soft_values.hpp"

namespace entropic {

using nlohmann::json;

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"solve", "gridworld", "verify-gradients", "train-critic", "rseac"};
  return names;
}

void ExperimentConfig::validate() const {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end())
    throw ValidationError("unknown command '" + command + "'");
  if (threads < 1) throw ValidationError("threads must be at least 1");
  if (command == "solve" && mdp.empty()) throw ValidationError("solve needs an 'mdp' path");
  if (command == "train-critic") {
    if (env != "cartpole") throw ValidationError("train-critic supports env 'cartpole' only, got '" + env + "'");
    critic.validate();
  }
  if (command == "rseac") {
    make_env(*this);
    rseac.validate();
  }
  if (command == "gridworld") {
    gridworld.spec.validate();
    if (gridworld.rollouts < 1) throw ValidationError("gridworld rollouts must be positive");
  }
}

ExperimentConfig default_config(const std::string& command) {
  ExperimentConfig c;
  c.command = command;
  if (command == "train-critic") c.env = "cartpole";
  if (command == "rseac") c.env = "pointmass-risky";
  return c;
}

namespace {

// Reads keys of one JSON object into typed fields and rejects whatever is left over.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError("config section '" + name() + "' must be an object");
  }

  template <class T>
  void get(const std::string& key, T& dst) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      dst = it->template get<T>();
    } catch (const json::exception& e) {
      throw ValidationError("config key '" + qualified(key) + "' has the wrong type: " + e.what());
    }
  }

  void cell(const std::string& key, Cell& dst) {
    std::vector<int> xy{dst.x, dst.y};
    get(key, xy);
    if (xy.size() != 2) throw ValidationError("config key '" + qualified(key) + "' must be [x, y]");
    dst = {xy[0], xy[1]};
  }

  const json* sub(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ValidationError("unknown config key '" + qualified(item.key()) + "'");
  }

 private:
  std::string name() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_critic(const json& j, DiscreteCriticConfig& c) {
  Section s(j, "critic");
  std::string mode = to_string(c.mode);
  s.get("mode", mode);
  c.mode = parse_critic_mode(mode);
  s.get("beta", c.beta);
  s.get("steps", c.steps);
  s.get("warmup", c.warmup);
  s.get("epoch", c.epoch);
  s.get("gamma", c.gamma);
  s.get("tau", c.tau);
  s.get("buffer", c.buffer);
  s.get("hidden", c.hidden);
  s.get("lr", c.lr);
  s.get("weight_decay", c.weight_decay);
  s.get("epsilon", c.epsilon);
  s.get("batch", c.batch);
  s.get("eval_episodes", c.eval_episodes);
  s.get("clip_c", c.clip_c);
  s.finish();
}

void read_rseac(const json& j, RsEacConfig& c) {
  Section s(j, "rseac");
  s.get("beta", c.beta);
  s.get("steps", c.steps);
  s.get("warmup", c.warmup);
  s.get("epoch", c.epoch);
  s.get("gamma", c.gamma);
  s.get("tau", c.tau);
  s.get("lr", c.lr);
  s.get("exploration_noise", c.exploration_noise);
  s.get("policy_noise", c.policy_noise);
  s.get("noise_clip", c.noise_clip);
  s.get("policy_delay", c.policy_delay);
  s.get("buffer", c.buffer);
  s.get("batch", c.batch);
  s.get("actor_hidden", c.actor_hidden);
  s.get("critic_hidden", c.critic_hidden);
  s.get("eval_episodes", c.eval_episodes);
  s.get("clip_c", c.clip_c);
  s.finish();
}

void read_gridworld(const json& j, GridworldRunConfig& c) {
  Section s(j, "gridworld");
  s.get("width", c.spec.width);
  s.get("height", c.spec.height);
  s.cell("start", c.spec.start);
  s.cell("goal", c.spec.goal);
  if (const json* cliff = s.sub("cliff")) {
    if (!cliff->is_array()) throw ValidationError("config key 'gridworld.cliff' must be a list of [x, y]");
    c.spec.cliff.clear();
    for (const auto& xy : *cliff) {
      if (!xy.is_array() || xy.size() != 2 || !xy[0].is_number_integer() || !xy[1].is_number_integer())
        throw ValidationError("config key 'gridworld.cliff' must be a list of [x, y]");
      c.spec.cliff.push_back({xy[0].get<int>(), xy[1].get<int>()});
    }
  }
  s.get("slip", c.spec.slip);
  s.get("step_reward", c.spec.step_reward);
  s.get("cliff_reward", c.spec.cliff_reward);
  s.get("discount", c.spec.discount);
  s.get("beta", c.learner.beta);
  s.get("epsilon", c.learner.epsilon);
  s.get("episodes", c.learner.episodes);
  s.get("step_size", c.learner.step_size);
  s.get("max_episode_steps", c.learner.max_episode_steps);
  s.get("rollouts", c.rollouts);
  s.finish();
}

void read_pointmass(const json& j, PointMassSpec& p) {
  Section s(j, "pointmass");
  s.get("start_x", p.start_x);
  s.get("start_y", p.start_y);
  s.get("goal_x", p.goal_x);
  s.get("goal_y", p.goal_y);
  s.get("goal_radius", p.goal_radius);
  s.get("dt", p.dt);
  s.get("region_x_lo", p.region_x_lo);
  s.get("region_x_hi", p.region_x_hi);
  s.get("region_y_lo", p.region_y_lo);
  s.get("region_y_hi", p.region_y_hi);
  s.get("noise_sigma", p.noise_sigma);
  s.get("bound", p.bound);
  s.get("max_steps", p.max_steps);
  s.finish();
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ValidationError("config document must be a JSON object");
  const auto cmd = doc.find("command");
  if (cmd == doc.end() || !cmd->is_string()) throw ValidationError("config needs a string 'command'");
  ExperimentConfig c = default_config(cmd->get<std::string>());
  Section s(doc, "");
  s.get("command", c.command);
  s.get("env", c.env);
  s.get("seeds", c.seeds);
  s.get("threads", c.threads);
  std::string out = c.out.string(), mdp = c.mdp.string();
  s.get("out", out);
  s.get("mdp", mdp);
  c.out = out;
  c.mdp = mdp;
  s.get("solve_beta", c.solve_beta);
  if (const json* j = s.sub("critic")) read_critic(*j, c.critic);
  if (const json* j = s.sub("rseac")) read_rseac(*j, c.rseac);
  if (const json* j = s.sub("gridworld")) read_gridworld(*j, c.gridworld);
  if (const json* j = s.sub("pointmass")) read_pointmass(*j, c.pointmass);
  if (const json* j = s.sub("verify")) {
    Section v(*j, "verify");
    v.get("betas", c.verify.betas);
    v.get("fd_tolerance", c.verify.fd_tolerance);
    v.get("reference_tolerance", c.verify.reference_tolerance);
    v.finish();
  }
  if (const json* j = s.sub("pendulum")) {
    Section p(*j, "pendulum");
    p.get("sigma", c.pendulum_sigma);
    p.get("threshold", c.pendulum_threshold);
    p.finish();
  }
  if (const json* j = s.sub("bandit")) {
    Section b(*j, "bandit");
    b.get("safe", c.bandit_safe);
    b.get("mean", c.bandit_mean);
    b.get("sigma", c.bandit_sigma);
    b.finish();
  }
  s.finish();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  const auto& k = c.critic;
  const auto& r = c.rseac;
  const auto& g = c.gridworld;
  const auto& p = c.pointmass;
  json cliff = json::array();
  for (const auto& cell : g.spec.cliff) cliff.push_back({cell.x, cell.y});
  return json{
      {"command", c.command},
      {"env", c.env},
      {"seeds", c.seeds},
      {"threads", c.threads},
      {"out", c.out.string()},
      {"mdp", c.mdp.string()},
      {"solve_beta", c.solve_beta},
      {"critic",
       {{"mode", to_string(k.mode)}, {"beta", k.beta}, {"steps", k.steps}, {"warmup", k.warmup}, {"epoch", k.epoch},
        {"gamma", k.gamma}, {"tau", k.tau}, {"buffer", k.buffer}, {"hidden", k.hidden}, {"lr", k.lr},
        {"weight_decay", k.weight_decay}, {"epsilon", k.epsilon}, {"batch", k.batch},
        {"eval_episodes", k.eval_episodes}, {"clip_c", k.clip_c}}},
      {"rseac",
       {{"beta", r.beta}, {"steps", r.steps}, {"warmup", r.warmup}, {"epoch", r.epoch}, {"gamma", r.gamma},
        {"tau", r.tau}, {"lr", r.lr}, {"exploration_noise", r.exploration_noise},
        {"policy_noise", r.policy_noise}, {"noise_clip", r.noise_clip}, {"policy_delay", r.policy_delay},
        {"buffer", r.buffer}, {"batch", r.batch}, {"actor_hidden", r.actor_hidden},
        {"critic_hidden", r.critic_hidden}, {"eval_episodes", r.eval_episodes}, {"clip_c", r.clip_c}}},
      {"gridworld",
       {{"width", g.spec.width}, {"height", g.spec.height}, {"start", {g.spec.start.x, g.spec.start.y}},
        {"goal", {g.spec.goal.x, g.spec.goal.y}}, {"cliff", cliff}, {"slip", g.spec.slip},
        {"step_reward", g.spec.step_reward}, {"cliff_reward", g.spec.cliff_reward},
        {"discount", g.spec.discount}, {"beta", g.learner.beta}, {"epsilon", g.learner.epsilon},
        {"episodes", g.learner.episodes}, {"step_size", g.learner.step_size},
        {"max_episode_steps", g.learner.max_episode_steps}, {"rollouts", g.rollouts}}},
      {"verify",
       {{"betas", c.verify.betas}, {"fd_tolerance", c.verify.fd_tolerance},
        {"reference_tolerance", c.verify.reference_tolerance}}},
      {"pointmass",
       {{"start_x", p.start_x}, {"start_y", p.start_y}, {"goal_x", p.goal_x}, {"goal_y", p.goal_y},
        {"goal_radius", p.goal_radius}, {"dt", p.dt}, {"region_x_lo", p.region_x_lo},
        {"region_x_hi", p.region_x_hi}, {"region_y_lo", p.region_y_lo}, {"region_y_hi", p.region_y_hi},
        {"noise_sigma", p.noise_sigma}, {"bound", p.bound}, {"max_steps", p.max_steps}}},
      {"pendulum", {{"sigma", c.pendulum_sigma}, {"threshold", c.pendulum_threshold}}},
      {"bandit", {{"safe", c.bandit_safe}, {"mean", c.bandit_mean}, {"sigma", c.bandit_sigma}}},
  };
}

void apply_overrides(ExperimentConfig& c, const ConfigOverrides& o) {
  if (o.beta) {
    c.critic.beta = c.rseac.beta = c.gridworld.learner.beta = c.solve_beta = *o.beta;
  }
  if (o.steps) c.critic.steps = c.rseac.steps = *o.steps;
  if (o.seed) c.seeds = {*o.seed};
  if (o.env) c.env = *o.env;
  if (o.mode) c.critic.mode = parse_critic_mode(*o.mode);
  if (o.out) c.out = *o.out;
  if (o.episodes) c.gridworld.learner.episodes = *o.episodes;
  if (o.threads) c.threads = *o.threads;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::unique_ptr<ContinuousEnv> make_env(const ExperimentConfig& c) {
  if (c.env == "pendulum-risky") return std::make_unique<RiskyPendulum>(c.pendulum_sigma, c.pendulum_threshold);
  if (c.env == "pointmass-risky") return std::make_unique<RiskyPointMass>(c.pointmass);
  if (c.env == "bandit-risky") return std::make_unique<RiskyBandit>(c.bandit_safe, c.bandit_mean, c.bandit_sigma);
  throw ValidationError("unknown continuous env '" + c.env + "' (expected pendulum-risky, pointmass-risky or bandit-risky)");
}

std::vector<MetricsLog> run_seeds(const std::vector<std::uint64_t>& seeds, int threads,
                                  const std::function<MetricsLog(std::uint64_t)>& fn) {
  if (threads < 1) throw ValidationError("threads must be at least 1");
  std::vector<std::optional<MetricsLog>> slots(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        slots[i] = fn(seeds[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(threads), seeds.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<MetricsLog> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

MetricsLog aggregate(const std::vector<MetricsLog>& runs) {
  if (runs.empty()) throw ValidationError("nothing to aggregate");
  const auto& cols = runs.front().columns();
  for (const auto& r : runs)
    if (r.columns() != cols) throw ValidationError("runs to aggregate have different columns");
  std::vector<std::string> out_cols;
  for (const auto& c : cols) {
    out_cols.push_back(c + "_mean");
    out_cols.push_back(c + "_std");
  }
  out_cols.push_back("n_runs");
  MetricsLog agg(out_cols);

  std::vector<std::size_t> cursor(runs.size(), 0);
  for (const auto& rec : runs.front().records()) {
    bool everywhere = true;
    std::vector<const MetricsLog::Record*> rows;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto& recs = runs[k].records();
      while (cursor[k] < recs.size() && recs[cursor[k]].step < rec.step) ++cursor[k];
      if (cursor[k] >= recs.size() || recs[cursor[k]].step != rec.step) {
        everywhere = false;
        break;
      }
      rows.push_back(&recs[cursor[k]]);
    }
    if (!everywhere) continue;
    std::vector<double> values;
    const double n = static_cast<double>(rows.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      double mean = 0.0;
      for (const auto* r : rows) mean += r->values[c];
      mean /= n;
      double var = 0.0;
      for (const auto* r : rows) var += (r->values[c] - mean) * (r->values[c] - mean);
      values.push_back(mean);
      values.push_back(std::sqrt(var / n));
    }
    values.push_back(n);
    agg.add(rec.step, std::move(values));
  }
  return agg;
}

std::vector<VerifyRow> verify_gradients(const std::vector<std::uint64_t>& seeds, const VerifyConfig& cfg) {
  std::vector<VerifyRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto seed : seeds) {
    for (double b : cfg.betas) {
      const RiskParameter beta(b);
      Rng rng(seed);
      const std::size_t ns = 3 + rng.index(3), na = 2 + rng.index(2);

      const auto mdp = random_tabular_mdp(rng, ns, na, 3);
      const Mat logits = random_logits(rng, ns, na);
      const double e1 = relative_error(
          stochastic_pg_thm1(mdp, logits, beta),
          central_difference_gradient(
              [&](const Mat& th) { return entropic_risk_enumerate(mdp, StochasticTabularPolicy::softmax(th), beta); },
              logits));
      rows.push_back({seed, "thm1", b, e1, e1 <= cfg.fd_tolerance});

      const auto cmdp = random_cmdp(rng, ns, 3);
      const auto policy = random_action_policy(rng, ns);
      const double e2 = relative_error(
          deterministic_pg_thm2(cmdp, policy, beta),
          central_difference_gradient(
              [&](const Vec& th) { return deterministic_objective(cmdp, DeterministicTabularActionPolicy(th), beta); },
              policy.params()));
      rows.push_back({seed, "thm2", b, e2, e2 <= cfg.fd_tolerance});

      const auto dcmdp = random_cmdp(rng, ns, 3, 0.9);
      const auto dpolicy = random_action_policy(rng, ns);
      const Vec rho = random_distribution(rng, ns);
      const double e3 = relative_error(off_policy_grad_det(dcmdp, dpolicy, beta, rho),
                                       off_policy_grad_det_reference(dcmdp, dpolicy, beta, rho));
      rows.push_back({seed, "eq12-det", b, e3, e3 <= cfg.reference_tolerance});

      const auto dmdp = random_tabular_mdp(rng, ns, na, 3, 0.9);
      const auto spolicy = StochasticTabularPolicy::softmax(random_logits(rng, ns, na));
      const double e4 = relative_error(off_policy_grad_stoch(dmdp, spolicy, beta, rho),
                                       off_policy_grad_stoch_reference(dmdp, spolicy, beta, rho));
      rows.push_back({seed, "a4-stoch", b, e4, e4 <= cfg.reference_tolerance});

      rows.push_back({seed, "thm3", b, nan, improvement_check_det(dcmdp, dpolicy, beta, rho).passed});
      rows.push_back({seed, "thm3.4", b, nan, improvement_check_stoch(dmdp, spolicy, beta, rho).passed});
    }
  }
  return rows;
}

void write_verify_csv(std::ostream& out, const std::vector<VerifyRow>& rows) {
  out << "seed,theorem,beta,relative_error,pass\n";
  for (const auto& r : rows)
    out << r.seed << ',' << r.theorem << ',' << format_double(r.beta) << ',' << format_double(r.relative_error) << ','
        << (r.pass ? 1 : 0) << '\n';
}

namespace {

std::filesystem::path seed_file(const ExperimentConfig& c, std::uint64_t seed, const std::string& suffix = "") {
  return c.out / (c.command + "_seed" + std::to_string(seed) + suffix + ".csv");
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open " + path.string() + " for writing");
  return out;
}

void stamp(MetricsLog& log, const ExperimentConfig& c, std::uint64_t seed) {
  log.metadata = {seed, config_hash(c), build_id()};
}

MetricsLog run_gridworld_seed(const ExperimentConfig& c, std::uint64_t seed) {
  const CliffGridWorld grid(c.gridworld.spec);
  Rng rng(seed);
  const auto res = exp_q_learning(grid.mdp(), c.gridworld.learner, rng);
  MetricsLog log({"return", "length", "terminated", "cliff"});
  for (const auto& e : res.episodes)
    log.add(e.episode, {e.undiscounted_return, static_cast<double>(e.length), e.terminated ? 1.0 : 0.0,
                        grid.is_cliff(e.final_state) ? 1.0 : 0.0});
  if (res.frozen_at) log.abort(*res.frozen_at, res.table.diagnostic);
  stamp(log, c, seed);
  log.save(seed_file(c, seed));

  const Vec logz = res.table.log_z_greedy();
  {
    auto out = open_out(seed_file(c, seed, "_logz"));
    for (int x = 0; x < grid.spec().width; ++x) out << (x ? "," : "") << 'c' << x;
    out << '\n';
    for (int y = 0; y < grid.spec().height; ++y) {
      for (int x = 0; x < grid.spec().width; ++x)
        out << (x ? "," : "") << format_double(logz(static_cast<Eigen::Index>(grid.state({x, y}))));
      out << '\n';
    }
  }
  if (!res.table.frozen) {
    const auto policy = greedy_policy(res.table);
    Rng traj_rng = rng.split();
    auto out = open_out(seed_file(c, seed, "_trajectory"));
    out << "t,x,y\n";
    const auto cells = greedy_trajectory(grid, policy, traj_rng, c.gridworld.learner.max_episode_steps);
    for (std::size_t t = 0; t < cells.size(); ++t) out << t << ',' << cells[t].x << ',' << cells[t].y << '\n';
    const auto prof = policy_risk_profile(grid, policy, c.gridworld.rollouts, traj_rng,
                                          c.gridworld.learner.max_episode_steps);
    std::ofstream(c.out / ("gridworld_seed" + std::to_string(seed) + "_profile.json"))
        << json{{"goal_rate", prof.goal_rate},
                {"cliff_rate", prof.cliff_rate},
                {"mean_path_length", prof.mean_path_length},
                {"absorption_goal", prof.absorption_goal},
                {"absorption_cliff", prof.absorption_cliff},
                {"expected_absorption_steps", prof.expected_absorption_steps},
                {"max_abs_log_z", res.table.max_abs_log_z()}}
               .dump(2)
        << '\n';
  }
  return log;
}

MetricsLog run_critic_seed(const ExperimentConfig& c, std::uint64_t seed) {
  Rng rng(seed);
  auto res = train_discrete_critic(CartPole{}, c.critic, rng);
  stamp(res.log, c, seed);
  res.log.save(seed_file(c, seed));
  if (c.critic.mode == CriticMode::Stabilized && res.last_report.m.size() > 0) {
    auto out = open_out(seed_file(c, seed, "_batch"));
    const auto& r = res.last_report;
    out << "sample,m,m_minus_z,clipped\n";
    for (Eigen::Index i = 0; i < r.m.size(); ++i)
      out << i << ',' << format_double(r.m(i)) << ',' << format_double(r.shifted(i)) << ','
          << format_double(r.clipped(i)) << '\n';
  }
  return std::move(res.log);
}

MetricsLog run_rseac_seed(const ExperimentConfig& c, std::uint64_t seed) {
  const auto env = make_env(c);
  Rng rng(seed);
  auto res = train_rseac(*env, c.rseac, rng);
  stamp(res.log, c, seed);
  res.log.save(seed_file(c, seed));
  return std::move(res.log);
}

std::string summarize(const MetricsLog& log, std::uint64_t seed) {
  std::ostringstream os;
  os << "seed " << seed << ": ";
  if (log.aborted()) {
    os << "aborted at step " << *log.abort_step() << " (" << log.abort_reason() << ")";
  } else if (!log.empty()) {
    const auto& last = log.records().back();
    os << "step " << last.step;
    for (std::size_t i = 0; i < log.columns().size(); ++i) os << ' ' << log.columns()[i] << '=' << format_double(last.values[i]);
  }
  return os.str();
}

}  // namespace

RunReport run(const ExperimentConfig& c) {
  c.validate();
  std::filesystem::create_directories(c.out);
  RunReport report;

  if (c.command == "solve") {
    const auto mdp = load_mdp(c.mdp);
    const auto mode = mdp.discount() ? BackupMode::Discounted : BackupMode::FiniteHorizon;
    const auto sol = soft_value_control(mdp, RiskParameter(c.solve_beta), mode);
    const auto path = c.out / "solve.csv";
    auto out = open_out(path);
    out << "state,v,greedy";
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) out << ",q" << a;
    out << '\n';
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
      const auto i = static_cast<Eigen::Index>(s);
      out << s << ',' << format_double(sol.values.v()(i)) << ',' << sol.greedy[s];
      for (std::size_t a = 0; a < mdp.n_actions(); ++a)
        out << ',' << format_double(sol.values.q()(i, static_cast<Eigen::Index>(a)));
      out << '\n';
    }
    report.files.push_back(path);
    report.lines.push_back("objective " + format_double(entropic_objective(mdp, sol.values)));
    return report;
  }

  if (c.command == "verify-gradients") {
    const auto rows = verify_gradients(c.seeds, c.verify);
    const auto path = c.out / "verify_gradients.csv";
    auto out = open_out(path);
    write_verify_csv(out, rows);
    report.files.push_back(path);
    for (const char* thm : {"thm1", "thm2", "eq12-det", "a4-stoch", "thm3", "thm3.4"}) {
      int n = 0, pass = 0;
      double worst = 0.0;
      for (const auto& r : rows)
        if (r.theorem == thm) {
          ++n;
          pass += r.pass;
          if (std::isfinite(r.relative_error)) worst = std::max(worst, r.relative_error);
        }
      if (n == 0) continue;
      report.lines.push_back(std::string(thm) + ": " + std::to_string(pass) + "/" + std::to_string(n) + " pass" +
                             (std::string(thm).rfind("thm3", 0) == 0 ? "" : ", max relative error " + format_double(worst)));
    }
    return report;
  }

  std::function<MetricsLog(std::uint64_t)> fn;
  if (c.command == "gridworld") fn = [&](std::uint64_t s) { return run_gridworld_seed(c, s); };
  if (c.command == "train-critic") fn = [&](std::uint64_t s) { return run_critic_seed(c, s); };
  if (c.command == "rseac") fn = [&](std::uint64_t s) { return run_rseac_seed(c, s); };
  const auto logs = run_seeds(c.seeds, c.threads, fn);
  for (std::size_t k = 0; k < logs.size(); ++k) {
    report.files.push_back(seed_file(c, c.seeds[k]));
    report.lines.push_back(summarize(logs[k], c.seeds[k]));
    report.numerical_abort = report.numerical_abort || logs[k].aborted();
  }
  if (!logs.empty()) {
    auto agg = aggregate(logs);
    agg.metadata = {0, config_hash(c), build_id()};
    const auto path = c.out / (c.command + "_aggregate.csv");
    agg.save(path);
    report.files.push_back(path);
  }
  return report;
}

}  // namespace entropic
