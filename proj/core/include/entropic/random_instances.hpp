#pragma once

#include <optional>

#include "entropic/continuous_action_mdp.hpp"
#include "entropic/mdp.hpp"
#include "entropic/rng.hpp"

namespace entropic {

/// Uniform draw from the probability simplex (flat Dirichlet).
Vec random_distribution(Rng& rng, std::size_t n);

/// Dense random MDP: Dirichlet transition rows and initial distribution, rewards U[-1, 1], no terminals.
TabularMDP random_tabular_mdp(Rng& rng, std::size_t n_states, std::size_t n_actions, int horizon = 3,
                              std::optional<double> discount = std::nullopt);

/// Logits with entries U[-scale, scale].
Mat random_logits(Rng& rng, std::size_t n_states, std::size_t n_actions, double scale = 1.0);

/// Random smooth continuous-action MDP on [-2, 2]: scores u, w ~ U[-1, 1], reward c0, c1 ~ U[-1, 1],
/// c2 ~ -U[0.25, 1] (concave in the action).
FiniteStateContinuousActionMDP random_cmdp(Rng& rng, std::size_t n_states = 4, int horizon = 3,
                                           std::optional<double> discount = std::nullopt);

/// Random deterministic policy with actions U[-1, 1].
DeterministicTabularActionPolicy random_action_policy(Rng& rng, std::size_t n_states);

}  // namespace entropic
