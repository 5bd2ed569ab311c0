#pragma once

#include <cstdint>
#include <vector>

#include "stlrl/agent.hpp"
#include "stlrl/cmdp.hpp"

namespace stlrl {

struct EvalOptions {
  std::size_t episodes = 100;
  std::size_t episode_length = 1000;  // K
  double gamma = 0.99;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct Rollout {
  double discounted_return = 0.0;      // sum gamma^k r_k
  double discounted_stl_return = 0.0;  // sum gamma^k s_k
  double robustness = 0.0;             // of the whole constraint on the trace
  bool satisfied = false;              // Boolean verdict of the independent evaluator
};

struct EvalReport {
  double mean_return = 0.0, std_return = 0.0;
  double mean_stl_return = 0.0, std_stl_return = 0.0;
  std::size_t successes = 0;
  std::vector<Rollout> rollouts;  // in rollout-index order

  std::size_t episodes() const { return rollouts.size(); }
  double success_rate() const {
    return rollouts.empty() ? 0.0 : static_cast<double>(successes) / static_cast<double>(rollouts.size());
  }
};

/// One rollout with the deterministic policy from a given initial state.
Rollout rollout(const Agent& agent, TauCmdp& env, std::span<const double> x0, std::size_t steps,
                double gamma, Rng& rng);

/// N rollouts, rollout i seeded by derive_seed(seed, "eval", i). Results do
/// not depend on the thread count. Success is robustness >= 0, cross-checked
/// against the Boolean evaluator wherever robustness is non-zero.
EvalReport evaluate(const Agent& agent, const TauCmdp& env, const EvalOptions& options);

/// Robustness of the constraint on the prefix x_0 .. x_hrz of a trace.
double constraint_robustness(const Trace& trace, const stl::FragmentInfo& info);

}  // namespace stlrl
