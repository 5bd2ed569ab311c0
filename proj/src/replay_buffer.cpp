#include "stlrl/replay_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stlrl {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim)
    : capacity_(capacity), obs_dim_(obs_dim), action_dim_(action_dim) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  if (obs_dim == 0 || action_dim == 0) throw std::invalid_argument("replay buffer: zero dimension");
}

static void check_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string("replay buffer: non-finite ") + what);
}

void ReplayBuffer::push(std::span<const double> obs, std::span<const double> action,
                        std::span<const double> next_obs, double reward, double stl_reward) {
  if (obs.size() != obs_dim_ || next_obs.size() != obs_dim_ || action.size() != action_dim_)
    throw std::invalid_argument("replay buffer: experience has the wrong shape");
  check_finite(obs, "observation");
  check_finite(action, "action");
  check_finite(next_obs, "next observation");
  if (!std::isfinite(reward) || !std::isfinite(stl_reward))
    throw std::invalid_argument("replay buffer: non-finite reward");
  for (double a : action)
    if (a < -1.0 || a > 1.0) throw std::invalid_argument("replay buffer: action outside [-1, 1]");

  if (size_ < capacity_) {
    obs_.insert(obs_.end(), obs.begin(), obs.end());
    action_.insert(action_.end(), action.begin(), action.end());
    next_obs_.insert(next_obs_.end(), next_obs.begin(), next_obs.end());
    reward_.push_back(reward);
    stl_reward_.push_back(stl_reward);
    ++size_;
  } else {
    std::copy(obs.begin(), obs.end(), obs_.begin() + next_ * obs_dim_);
    std::copy(action.begin(), action.end(), action_.begin() + next_ * action_dim_);
    std::copy(next_obs.begin(), next_obs.end(), next_obs_.begin() + next_ * obs_dim_);
    reward_[next_] = reward;
    stl_reward_[next_] = stl_reward;
  }
  next_ = (next_ + 1) % capacity_;
}

std::size_t ReplayBuffer::slot_of(std::size_t age_rank) const {
  if (age_rank >= size_) throw std::out_of_range("replay buffer: rank past the stored experiences");
  const std::size_t oldest = size_ < capacity_ ? 0 : next_;
  return (oldest + age_rank) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, Rng& rng) const {
  if (count > size_)
    throw std::invalid_argument("replay buffer: cannot sample " + std::to_string(count) +
                                " experiences from " + std::to_string(size_));
  std::vector<std::size_t> out;
  out.reserve(count);
  for (std::size_t j = size_ - count; j < size_; ++j) {
    const std::size_t t = rng.index(j + 1);
    if (std::find(out.begin(), out.end(), t) == out.end())
      out.push_back(t);
    else
      out.push_back(j);
  }
  return out;
}

Batch ReplayBuffer::gather(std::span<const std::size_t> slots) const {
  const auto n = static_cast<Eigen::Index>(slots.size());
  Batch b;
  b.obs.resize(obs_dim_, n);
  b.action.resize(action_dim_, n);
  b.next_obs.resize(obs_dim_, n);
  b.reward.resize(n);
  b.stl_reward.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const std::size_t s = slots[c];
    if (s >= size_) throw std::out_of_range("replay buffer: slot not filled");
    for (std::size_t i = 0; i < obs_dim_; ++i) {
      b.obs(i, c) = obs_[s * obs_dim_ + i];
      b.next_obs(i, c) = next_obs_[s * obs_dim_ + i];
    }
    for (std::size_t i = 0; i < action_dim_; ++i) b.action(i, c) = action_[s * action_dim_ + i];
    b.reward(c) = reward_[s];
    b.stl_reward(c) = stl_reward_[s];
  }
  return b;
}

}  // namespace stlrl
