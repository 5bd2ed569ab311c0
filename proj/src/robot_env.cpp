#include "stlrl/robot_env.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace stlrl {

void EnvConfig::validate() const {
  for (const Box2* b : {&working_area, &region1, &region2, &initial_area})
    if (!(b->x_lo <= b->x_hi && b->y_lo <= b->y_hi))
      throw std::invalid_argument("EnvConfig: box bounds must satisfy low <= high");
  if (!(delta > 0.0)) throw std::invalid_argument("EnvConfig: delta must be positive");
  if (!(noise_scale >= 0.0)) throw std::invalid_argument("EnvConfig: noise scale must be >= 0");
  if (!(initial_heading >= 0.0)) throw std::invalid_argument("EnvConfig: heading range < 0");
}

RobotEnv::RobotEnv(EnvConfig config) : config_(config) { config_.validate(); }

double wrap_angle(double theta) { return std::remainder(theta, 2.0 * std::numbers::pi); }

std::vector<double> RobotEnv::reset(Rng& rng) const {
  const auto& b = config_.initial_area;
  const double x = rng.uniform(b.x_lo, b.x_hi);
  const double y = rng.uniform(b.y_lo, b.y_hi);
  const double h = rng.uniform(-config_.initial_heading, config_.initial_heading);
  return {x, y, h};
}

std::vector<double> RobotEnv::step(std::span<const double> x, std::span<const double> a,
                                   Rng& rng) const {
  if (x.size() != 3 || a.size() != 2) throw std::invalid_argument("RobotEnv::step: bad shapes");
  if (!std::isfinite(a[0]) || !std::isfinite(a[1]))
    throw std::invalid_argument("RobotEnv::step: non-finite action");
  const double speed = std::clamp(a[0], -1.0, 1.0);
  const double turn = std::clamp(a[1], -1.0, 1.0);
  double w0 = 0.0, w1 = 0.0, w2 = 0.0;
  if (config_.noise) {
    w0 = rng.normal();
    w1 = rng.normal();
    w2 = rng.normal();
  }
  const double d = config_.delta, dw = config_.noise_scale;
  return {x[0] + d * speed * std::cos(x[2]) + dw * w0,
          x[1] + d * speed * std::sin(x[2]) + dw * w1,
          wrap_angle(x[2] + d * turn + dw * w2)};
}

double RobotEnv::area_reward(std::span<const double> x) const {
  const auto& w = config_.working_area;
  return std::min({x[0] - w.x_lo, w.x_hi - x[0], x[1] - w.y_lo, w.y_hi - x[1], 0.0});
}

double RobotEnv::action_reward(std::span<const double> a) {
  double sq = 0.0;
  for (double v : a) sq += v * v;
  return -sq;
}

double RobotEnv::reward(std::span<const double> x, std::span<const double> a) const {
  return area_reward(x) + action_reward(a);
}

std::vector<double> RobotEnv::input_offsets() const {
  return {config_.input_offsets.begin(), config_.input_offsets.end()};
}

static std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string box_text(const Box2& box) {
  return num(box.x_lo) + " <= x0 <= " + num(box.x_hi) + " & " + num(box.y_lo) +
         " <= x1 <= " + num(box.y_hi);
}

stl::Formula box_formula(const Box2& box, std::size_t state_dim) {
  return stl::parse(box_text(box), state_dim);
}

std::pair<stl::Formula, stl::Formula> region_predicates(const EnvConfig& config) {
  return {box_formula(config.region1), box_formula(config.region2)};
}

}  // namespace stlrl
