#pragma once

// The two-phase training loop: episodic rollouts on the tau-CMDP, a replay
// buffer, pre-training updates while the step counter is below K_pre and
// fine-tuning (with kappa updates) afterwards.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>

#include "stlrl/agent.hpp"
#include "stlrl/cmdp.hpp"
#include "stlrl/replay_buffer.hpp"

namespace stlrl {

struct TrainConfig {
  std::size_t total_steps = 600000;
  std::size_t pretrain_steps = 0;  // K_pre
  std::size_t episode_length = 1000;  // K
  std::size_t batch_size = 64;     // I
  std::size_t buffer_capacity = 100000;
  std::size_t metrics_interval = 1;  // in episodes
  std::size_t eval_interval = 0;     // in steps; 0 disables periodic evaluation

  void validate(std::size_t tau) const;
};

/// One row of the metrics stream, written at the end of an episode. Losses
/// are means over the episode's learning steps (NaN when none happened).
struct MetricsRow {
  std::size_t step = 0;
  std::size_t episode = 0;
  double sum_reward = 0.0;
  double sum_stl_reward = 0.0;
  double kappa = 0.0;
  double alpha = 0.0;
  double actor_loss = 0.0;
  double critic_r_loss = 0.0;
  double critic_s_loss = 0.0;
};

struct TrainHooks {
  std::function<void(const MetricsRow&)> on_metrics;
  /// After every environment step (and its learning step, if any).
  std::function<void(std::size_t step, const Agent&)> on_step;
  /// Every eval_interval steps.
  std::function<void(std::size_t step, const Agent&)> on_eval;
};

class Trainer {
 public:
  Trainer(TauCmdp env, AgentConfig agent_config, TrainConfig config, std::uint64_t seed);

  /// Runs until total_steps environment steps have been taken.
  void run(const TrainHooks& hooks = {});

  Agent& agent() { return *agent_; }
  const Agent& agent() const { return *agent_; }
  const TauCmdp& env() const { return env_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const TrainConfig& config() const { return config_; }
  std::size_t steps() const { return steps_; }
  std::size_t episodes() const { return episodes_; }
  Phase phase() const { return steps_ < config_.pretrain_steps ? Phase::Pretrain : Phase::Finetune; }

  /// Agent, counters and random streams; the replay buffer is not stored.
  void save(std::ostream& os) const;
  void load(std::istream& is);
  /// Reads only the agent out of a stream written by save().
  static void load_agent(std::istream& is, Agent& agent);

 private:
  nn::Matrix initial_batch(std::size_t count);

  TauCmdp env_;
  TrainConfig config_;
  std::unique_ptr<Agent> agent_;
  ReplayBuffer buffer_;
  Rng env_rng_, policy_rng_, sample_rng_, update_rng_, kappa_rng_;
  std::size_t steps_ = 0;
  std::size_t episodes_ = 0;
};

}  // namespace stlrl
