#pragma once

#include <cstddef>

#include "entropic/mdp.hpp"
#include "entropic/rng.hpp"

namespace entropic {

/// Mini-batch with one sample per column (rewards and done flags as vectors).
struct Batch {
  Mat states;
  Mat actions;
  Vec rewards;
  Mat next_states;
  /// 1.0 for transitions that ended the episode, else 0.0.
  Vec done;

  Eigen::Index size() const noexcept { return rewards.size(); }
};

/// Fixed-capacity FIFO ring of transitions with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, Eigen::Index state_dim, Eigen::Index action_dim);

  void add(const Vec& state, const Vec& action, double reward, const Vec& next_state, bool done);

  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return capacity_; }
  /// Slot of the i-th oldest stored transition, 0 <= i < size().
  Batch at(std::size_t i) const;
  /// Throws ValidationError when the buffer is empty or n is zero.
  Batch sample(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t size_ = 0;
  std::size_t next_ = 0;
  Mat states_;
  Mat actions_;
  Vec rewards_;
  Mat next_states_;
  Vec done_;

  Batch gather(const std::vector<Eigen::Index>& slots) const;
};

}  // namespace entropic
