#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stlrl/nn.hpp"
#include "stlrl/rng.hpp"

namespace stlrl {

/// A mini-batch, one experience per column.
struct Batch {
  nn::Matrix obs;          // obs_dim x I
  nn::Matrix action;       // action_dim x I
  nn::Matrix next_obs;     // obs_dim x I
  nn::RowVector reward;    // task reward r
  nn::RowVector stl_reward;  // STL reward s

  std::size_t size() const { return static_cast<std::size_t>(obs.cols()); }
};

/// Fixed-capacity ring of experiences (z, a, z', r, s); the oldest entry is
/// overwritten once full.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t obs_dim, std::size_t action_dim);

  void push(std::span<const double> obs, std::span<const double> action,
            std::span<const double> next_obs, double reward, double stl_reward);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t obs_dim() const { return obs_dim_; }
  std::size_t action_dim() const { return action_dim_; }

  /// `count` distinct slots, uniform over the current contents (Floyd's algorithm).
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;
  Batch gather(std::span<const std::size_t> slots) const;
  Batch sample(std::size_t count, Rng& rng) const { return gather(sample_indices(count, rng)); }

  /// Slot that the i-th oldest stored experience occupies.
  std::size_t slot_of(std::size_t age_rank) const;
  double reward_at(std::size_t slot) const { return reward_.at(slot); }

 private:
  std::size_t capacity_, obs_dim_, action_dim_;
  std::size_t size_ = 0, next_ = 0;
  std::vector<double> obs_, action_, next_obs_, reward_, stl_reward_;
};

}  // namespace stlrl
