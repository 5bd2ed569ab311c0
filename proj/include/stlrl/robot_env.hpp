#pragma once

// Two-wheeled mobile robot in a 4 x 4 working area with two labelled goal
// regions. State (x0, x1, heading), action (speed, turn rate) in [-1, 1]^2.

#include <array>
#include <numbers>
#include <string>
#include <utility>

#include "stlrl/plant.hpp"
#include "stlrl/stl.hpp"

namespace stlrl {

/// Axis-aligned closed box over the planar position.
struct Box2 {
  double x_lo, x_hi, y_lo, y_hi;
  bool contains(double x, double y) const {
    return x_lo <= x && x <= x_hi && y_lo <= y && y <= y_hi;
  }
};

struct EnvConfig {
  double delta = 0.1;         // step gain on the action
  double noise_scale = 0.01;  // diagonal of the noise weighting matrix
  bool noise = true;          // false pins w to zero
  Box2 working_area{0.5, 4.5, 0.5, 4.5};
  Box2 region1{3.5, 4.5, 3.5, 4.5};
  Box2 region2{3.5, 4.5, 1.5, 2.5};
  Box2 initial_area{0.5, 2.5, 0.5, 2.5};
  double initial_heading = std::numbers::pi / 2;  // heading drawn from [-h, h]
  std::array<double, 3> input_offsets{2.5, 2.5, 0.0};

  void validate() const;
};

class RobotEnv final : public Plant {
 public:
  explicit RobotEnv(EnvConfig config = {});

  std::size_t state_dim() const override { return 3; }
  std::size_t action_dim() const override { return 2; }

  std::vector<double> reset(Rng& rng) const override;
  std::vector<double> step(std::span<const double> x, std::span<const double> a,
                           Rng& rng) const override;
  double reward(std::span<const double> x, std::span<const double> a) const override;
  std::vector<double> input_offsets() const override;

  const EnvConfig& config() const { return config_; }

  /// Working-area term: min of the signed distances to the four walls, capped at 0.
  double area_reward(std::span<const double> x) const;
  /// Fuel term: -|a|^2.
  static double action_reward(std::span<const double> a);

 private:
  EnvConfig config_;
};

/// Wraps an angle into [-pi, pi].
double wrap_angle(double theta);

/// Box membership as a conjunction of four linear predicates over (x0, x1).
stl::Formula box_formula(const Box2& box, std::size_t state_dim = 3);
/// Same box as parseable text, e.g. "3.5 <= x0 <= 4.5 & 3.5 <= x1 <= 4.5".
std::string box_text(const Box2& box);

/// The two region atoms (region 1, region 2) of the benchmark.
std::pair<stl::Formula, stl::Formula> region_predicates(const EnvConfig& config = {});

}  // namespace stlrl
