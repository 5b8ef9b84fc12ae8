#pragma once

#include <cstddef>
#include <vector>

#include "entropic/mdp.hpp"

namespace entropic {

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

/// Stochastic cliff gridworld. y = 0 is the top row; states are row-major y * width + x.
struct GridWorldSpec {
  int width = 10;
  int height = 10;
  Cell start{0, 9};
  Cell goal{9, 9};
  std::vector<Cell> cliff = default_cliff();
  double slip = 0.2;
  double step_reward = -1.0;
  double cliff_reward = -10.0;
  double discount = 0.85;

  static std::vector<Cell> default_cliff();
  /// Throws ValidationError naming the violated constraint.
  void validate() const;
};

enum class Action : std::size_t { Up = 0, Left = 1, Down = 2, Right = 3 };

/// The built MDP plus the bookkeeping needed to read outcomes off state indices.
///
/// Every cell is a state. Cliff and goal cells are absorbing in effect: any action there
/// moves to a terminal sink, paying step_reward + cliff_reward from a cliff cell and 0
/// from the goal. Entering any cell costs step_reward. The intended move happens with
/// probability 1 - slip; otherwise one of the four directions is drawn uniformly
/// (slip / 4 each) and walls clamp the move.
class CliffGridWorld {
 public:
  explicit CliffGridWorld(GridWorldSpec spec);

  const GridWorldSpec& spec() const noexcept { return spec_; }
  const TabularMDP& mdp() const noexcept { return mdp_; }

  std::size_t n_cells() const noexcept { return static_cast<std::size_t>(spec_.width * spec_.height); }
  std::size_t state(Cell c) const;
  Cell cell(std::size_t s) const;
  std::size_t start_state() const { return state(spec_.start); }
  std::size_t goal_state() const { return state(spec_.goal); }
  std::size_t sink_state() const noexcept { return n_cells(); }
  bool is_cliff(std::size_t s) const { return s < cliff_flags_.size() && cliff_flags_[s]; }
  bool is_goal(std::size_t s) const { return s == goal_state(); }
  /// Cliff or goal: the episode outcome is decided on entering such a cell.
  bool is_absorbing_cell(std::size_t s) const { return is_cliff(s) || is_goal(s); }

 private:
  GridWorldSpec spec_;
  std::vector<bool> cliff_flags_;
  TabularMDP mdp_;
};

TabularMDP build_cliff_gridworld(const GridWorldSpec& spec);

}  // namespace entropic
