#include "entropic/gridworld.hpp"

#include <algorithm>
#include <string>

#include "entropic/errors.hpp"

namespace entropic {

namespace {

constexpr int kDx[4] = {0, -1, 0, 1};
constexpr int kDy[4] = {-1, 0, 1, 0};

bool inside(const GridWorldSpec& spec, Cell c) { return c.x >= 0 && c.y >= 0 && c.x < spec.width && c.y < spec.height; }

std::string str(Cell c) { return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")"; }

std::vector<bool> cliff_flags(const GridWorldSpec& spec) {
  spec.validate();
  std::vector<bool> flags(static_cast<std::size_t>(spec.width * spec.height), false);
  for (Cell c : spec.cliff) flags[static_cast<std::size_t>(c.y * spec.width + c.x)] = true;
  return flags;
}

TabularMDP build(const GridWorldSpec& spec, const std::vector<bool>& cliff) {
  const int cells = spec.width * spec.height;
  const Eigen::Index n = cells + 1;
  const Eigen::Index sink = cells;
  const Eigen::Index goal = spec.goal.y * spec.width + spec.goal.x;
  std::vector<Mat> p(4, Mat::Zero(n, n));
  Mat r = Mat::Zero(n, 4);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const Eigen::Index s = y * spec.width + x;
      if (cliff[static_cast<std::size_t>(s)] || s == goal) {
        for (std::size_t a = 0; a < 4; ++a) {
          p[a](s, sink) = 1.0;
          r(s, static_cast<Eigen::Index>(a)) = s == goal ? 0.0 : spec.step_reward + spec.cliff_reward;
        }
        continue;
      }
      for (std::size_t a = 0; a < 4; ++a) {
        r(s, static_cast<Eigen::Index>(a)) = spec.step_reward;
        for (std::size_t d = 0; d < 4; ++d) {
          const double prob = (d == a ? 1.0 - spec.slip : 0.0) + spec.slip / 4.0;
          if (prob == 0.0) continue;
          const int nx = std::clamp(x + kDx[d], 0, spec.width - 1);
          const int ny = std::clamp(y + kDy[d], 0, spec.height - 1);
          p[a](s, ny * spec.width + nx) += prob;
        }
      }
    }
  }
  for (std::size_t a = 0; a < 4; ++a) p[a](sink, sink) = 1.0;
  Vec init = Vec::Zero(n);
  init(spec.start.y * spec.width + spec.start.x) = 1.0;
  std::vector<bool> terminal(static_cast<std::size_t>(n), false);
  terminal.back() = true;
  return TabularMDP(std::move(p), std::move(r), std::move(init), std::move(terminal), std::nullopt, spec.discount);
}

}  // namespace

std::vector<Cell> GridWorldSpec::default_cliff() {
  std::vector<Cell> c;
  for (int x = 2; x <= 7; ++x) c.push_back({x, 9});
  return c;
}

void GridWorldSpec::validate() const {
  if (width < 1 || height < 1) throw ValidationError("grid must have positive width and height");
  if (!inside(*this, start)) throw ValidationError("start " + str(start) + " lies outside the grid");
  if (!inside(*this, goal)) throw ValidationError("goal " + str(goal) + " lies outside the grid");
  if (start == goal) throw ValidationError("start and goal coincide");
  for (Cell c : cliff) {
    if (!inside(*this, c)) throw ValidationError("cliff cell " + str(c) + " lies outside the grid");
    if (c == start) throw ValidationError("start " + str(start) + " is a cliff cell");
    if (c == goal) throw ValidationError("goal " + str(goal) + " is a cliff cell");
  }
  if (!(slip >= 0.0 && slip < 1.0)) throw ValidationError("slip must lie in [0, 1)");
  if (!(discount > 0.0 && discount <= 1.0)) throw ValidationError("discount must lie in (0, 1]");
}

CliffGridWorld::CliffGridWorld(GridWorldSpec spec)
    : spec_(std::move(spec)), cliff_flags_(cliff_flags(spec_)), mdp_(build(spec_, cliff_flags_)) {}

std::size_t CliffGridWorld::state(Cell c) const {
  if (!inside(spec_, c)) throw std::out_of_range("cell " + str(c) + " outside the grid");
  return static_cast<std::size_t>(c.y * spec_.width + c.x);
}

Cell CliffGridWorld::cell(std::size_t s) const {
  if (s >= n_cells()) throw std::out_of_range("state " + std::to_string(s) + " is not a grid cell");
  const int i = static_cast<int>(s);
  return {i % spec_.width, i / spec_.width};
}

TabularMDP build_cliff_gridworld(const GridWorldSpec& spec) { return CliffGridWorld(spec).mdp(); }

}  // namespace entropic
