#include "entropic/mdp_json.hpp"

#include <fstream>
#include <set>
#include <string>

#include "entropic/errors.hpp"

namespace entropic {

namespace {

const nlohmann::json& require(const nlohmann::json& doc, const char* key) {
  if (!doc.contains(key)) throw ValidationError(std::string("MDP document missing key '") + key + "'");
  return doc.at(key);
}

double number(const nlohmann::json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where + " is not a number");
  return v.get<double>();
}

TabularMDP parse_mdp(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("MDP document must be a JSON object");
  static const std::set<std::string> known{"n_states", "n_actions", "transition", "reward",
                                           "initial",  "terminal",  "horizon",    "discount"};
  for (const auto& [k, v] : doc.items())
    if (!known.count(k)) throw ValidationError("MDP document has unknown key '" + k + "'");

  const auto n_s = require(doc, "n_states").get<long>();
  const auto n_a = require(doc, "n_actions").get<long>();
  if (n_s <= 0 || n_a <= 0) throw ValidationError("n_states and n_actions must be positive");

  const auto& tr = require(doc, "transition");
  const auto& rw = require(doc, "reward");
  const auto& init = require(doc, "initial");
  if (!tr.is_array() || static_cast<long>(tr.size()) != n_s) throw ValidationError("transition must have n_states rows");
  if (!rw.is_array() || static_cast<long>(rw.size()) != n_s) throw ValidationError("reward must have n_states rows");
  if (!init.is_array() || static_cast<long>(init.size()) != n_s) throw ValidationError("initial must have n_states entries");

  std::vector<Mat> transition(static_cast<std::size_t>(n_a), Mat::Zero(n_s, n_s));
  Mat reward(n_s, n_a);
  Vec initial(n_s);
  for (long s = 0; s < n_s; ++s) {
    const std::string srow = "[" + std::to_string(s) + "]";
    if (!tr[s].is_array() || static_cast<long>(tr[s].size()) != n_a)
      throw ValidationError("transition" + srow + " must have n_actions rows");
    if (!rw[s].is_array() || static_cast<long>(rw[s].size()) != n_a)
      throw ValidationError("reward" + srow + " must have n_actions entries");
    for (long a = 0; a < n_a; ++a) {
      const std::string arow = "transition" + srow + "[" + std::to_string(a) + "]";
      const auto& row = tr[s][a];
      if (!row.is_array() || static_cast<long>(row.size()) != n_s) throw ValidationError(arow + " must have n_states entries");
      for (long n = 0; n < n_s; ++n) transition[static_cast<std::size_t>(a)](s, n) = number(row[n], arow);
      reward(s, a) = number(rw[s][a], "reward" + srow + "[" + std::to_string(a) + "]");
    }
    initial(s) = number(init[s], "initial" + srow);
  }

  std::vector<bool> terminal(static_cast<std::size_t>(n_s), false);
  if (doc.contains("terminal")) {
    const auto& t = doc.at("terminal");
    if (!t.is_array() || static_cast<long>(t.size()) != n_s) throw ValidationError("terminal must have n_states entries");
    for (long s = 0; s < n_s; ++s) terminal[static_cast<std::size_t>(s)] = t[s].get<bool>();
  }
  std::optional<int> horizon;
  if (doc.contains("horizon") && !doc.at("horizon").is_null()) horizon = doc.at("horizon").get<int>();
  std::optional<double> discount;
  if (doc.contains("discount") && !doc.at("discount").is_null()) discount = number(doc.at("discount"), "discount");

  return TabularMDP(std::move(transition), std::move(reward), std::move(initial), std::move(terminal), horizon, discount);
}

}  // namespace

TabularMDP mdp_from_json(const nlohmann::json& doc) {
  try {
    return parse_mdp(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("MDP document has a wrongly typed field: ") + e.what());
  }
}

nlohmann::json mdp_to_json(const TabularMDP& mdp) {
  nlohmann::json doc;
  const auto n_s = mdp.n_states();
  const auto n_a = mdp.n_actions();
  doc["n_states"] = n_s;
  doc["n_actions"] = n_a;
  auto& tr = doc["transition"] = nlohmann::json::array();
  auto& rw = doc["reward"] = nlohmann::json::array();
  for (std::size_t s = 0; s < n_s; ++s) {
    nlohmann::json rows = nlohmann::json::array();
    nlohmann::json rs = nlohmann::json::array();
    for (std::size_t a = 0; a < n_a; ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t n = 0; n < n_s; ++n) row.push_back(mdp.transition(s, a, n));
      rows.push_back(std::move(row));
      rs.push_back(mdp.reward(s, a));
    }
    tr.push_back(std::move(rows));
    rw.push_back(std::move(rs));
  }
  doc["initial"] = std::vector<double>(mdp.initial().data(), mdp.initial().data() + mdp.initial().size());
  doc["terminal"] = mdp.terminal_flags();
  if (mdp.horizon()) doc["horizon"] = *mdp.horizon();
  if (mdp.discount()) doc["discount"] = *mdp.discount();
  return doc;
}

TabularMDP load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open MDP file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("MDP file " + path.string() + " is not valid JSON: " + e.what());
  }
  return mdp_from_json(doc);
}

}  // namespace entropic
