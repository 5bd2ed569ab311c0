#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stlrl/rng.hpp"

namespace stlrl {

/// A discrete-time stochastic system x' ~ p(. | x, a) with a task reward.
class Plant {
 public:
  virtual ~Plant() = default;

  virtual std::size_t state_dim() const = 0;
  virtual std::size_t action_dim() const = 0;

  /// Draws an initial state from p_0.
  virtual std::vector<double> reset(Rng& rng) const = 0;
  virtual std::vector<double> step(std::span<const double> x, std::span<const double> a,
                                   Rng& rng) const = 0;
  /// Task reward R(x, a).
  virtual double reward(std::span<const double> x, std::span<const double> a) const = 0;

  /// Subtracted from states before they reach a network.
  virtual std::vector<double> input_offsets() const {
    return std::vector<double>(state_dim(), 0.0);
  }
};

}  // namespace stlrl
