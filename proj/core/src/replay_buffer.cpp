#include "entropic/replay_buffer.hpp"

#include <vector>

#include "entropic/errors.hpp"

namespace entropic {

ReplayBuffer::ReplayBuffer(std::size_t capacity, Eigen::Index state_dim, Eigen::Index action_dim)
    : capacity_(capacity) {
  if (capacity == 0) throw ValidationError("replay buffer capacity must be positive");
  if (state_dim < 1 || action_dim < 1) throw ValidationError("replay buffer dimensions must be positive");
  const auto n = static_cast<Eigen::Index>(capacity);
  states_ = Mat::Zero(state_dim, n);
  actions_ = Mat::Zero(action_dim, n);
  rewards_ = Vec::Zero(n);
  next_states_ = Mat::Zero(state_dim, n);
  done_ = Vec::Zero(n);
}

void ReplayBuffer::add(const Vec& state, const Vec& action, double reward, const Vec& next_state, bool done) {
  if (state.size() != states_.rows() || next_state.size() != states_.rows() || action.size() != actions_.rows())
    throw ValidationError("transition shape does not match the replay buffer");
  const auto slot = static_cast<Eigen::Index>(next_);
  states_.col(slot) = state;
  actions_.col(slot) = action;
  rewards_(slot) = reward;
  next_states_.col(slot) = next_state;
  done_(slot) = done ? 1.0 : 0.0;
  next_ = (next_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

Batch ReplayBuffer::gather(const std::vector<Eigen::Index>& slots) const {
  const auto n = static_cast<Eigen::Index>(slots.size());
  Batch b{Mat(states_.rows(), n), Mat(actions_.rows(), n), Vec(n), Mat(states_.rows(), n), Vec(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto s = slots[static_cast<std::size_t>(i)];
    b.states.col(i) = states_.col(s);
    b.actions.col(i) = actions_.col(s);
    b.rewards(i) = rewards_(s);
    b.next_states.col(i) = next_states_.col(s);
    b.done(i) = done_(s);
  }
  return b;
}

Batch ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw ValidationError("replay buffer index out of range");
  const std::size_t oldest = size_ < capacity_ ? 0 : next_;
  return gather({static_cast<Eigen::Index>((oldest + i) % capacity_)});
}

Batch ReplayBuffer::sample(std::size_t n, Rng& rng) const {
  if (size_ == 0) throw ValidationError("cannot sample from an empty replay buffer");
  if (n == 0) throw ValidationError("batch size must be positive");
  std::vector<Eigen::Index> slots(n);
  for (auto& s : slots) s = static_cast<Eigen::Index>(rng.index(size_));
  return gather(slots);
}

}  // namespace entropic
