#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "entropic/mdp.hpp"

namespace entropic {

// {"n_states", "n_actions", "transition": [s][a][s'], "reward": [s][a],
//  "initial", "terminal", "horizon"?, "discount"?}
TabularMDP mdp_from_json(const nlohmann::json& doc);
nlohmann::json mdp_to_json(const TabularMDP& mdp);
TabularMDP load_mdp(const std::filesystem::path& path);

}  // namespace entropic
