#include "stlrl/tau_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stlrl {

ExtendedState::ExtendedState(std::span<const double> x0, std::size_t tau) : window_(x0.size()) {
  if (tau == 0) throw std::invalid_argument("extended state needs tau >= 1");
  for (std::size_t i = 0; i < tau; ++i) window_.push_back(x0);
}

void ExtendedState::push(std::span<const double> x_next) {
  if (x_next.size() != dim()) throw std::invalid_argument("shift: state dimension mismatch");
  window_.pop_front();
  window_.push_back(x_next);
}

ExtendedState init_extended(std::span<const double> x0, std::size_t tau) {
  return ExtendedState(x0, tau);
}

ExtendedState shift(const ExtendedState& z, std::span<const double> x_next) {
  ExtendedState next = z;
  next.push(x_next);
  return next;
}

static void check_lse_args(std::span<const double> values, double beta) {
  if (values.empty()) throw std::invalid_argument("log-sum-exp of an empty set");
  if (!(beta > 0.0)) throw std::invalid_argument("log-sum-exp needs beta > 0");
}

double lse_min(std::span<const double> values, double beta) {
  check_lse_args(values, beta);
  const double lo = *std::min_element(values.begin(), values.end());
  double acc = 0.0;
  for (double y : values) acc += std::exp(-beta * (y - lo));
  // acc >= 1 because the minimum contributes exp(0).
  return std::min(lo, lo - std::log(acc) / beta);
}

double lse_max(std::span<const double> values, double beta) {
  check_lse_args(values, beta);
  const double hi = *std::max_element(values.begin(), values.end());
  double acc = 0.0;
  for (double y : values) acc += std::exp(beta * (y - hi));
  return std::max(hi, hi + std::log(acc) / beta);
}

StlRewardSpec reward_spec_for(const stl::FragmentInfo& info, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("STL reward needs beta > 0");
  return StlRewardSpec{info.inner, info.outer, beta, true};
}

double stl_reward(const ExtendedState& z, const StlRewardSpec& spec) {
  if (z.tau() != stl::horizon(spec.inner) + 1)
    throw std::invalid_argument("stl_reward: window length differs from horizon(phi) + 1");
  const int sat = indicator(stl::robustness(z.window(), 0, spec.inner));
  if (spec.outer == stl::Outer::Globally) return -std::exp(-spec.beta * sat);
  if (spec.normalize) return std::exp(spec.beta * (sat - 1));
  return std::exp(spec.beta * sat);
}

std::vector<double> window_robustness_series(const Trace& trace, const stl::FragmentInfo& info) {
  if (trace.size() < info.tau)
    throw std::invalid_argument("trace shorter than the window length tau = " +
                                std::to_string(info.tau));
  std::vector<double> out;
  out.reserve(trace.size() - info.tau + 1);
  for (std::size_t start = 0; start + info.tau <= trace.size(); ++start)
    out.push_back(stl::robustness(trace, start, info.inner));
  return out;
}

double trajectory_robustness(const Trace& trace, const stl::FragmentInfo& info) {
  const auto series = window_robustness_series(trace, info);
  return info.outer == stl::Outer::Globally ? *std::min_element(series.begin(), series.end())
                                            : *std::max_element(series.begin(), series.end());
}

}  // namespace stlrl
