#pragma once

// Constrained actor-critic agents: a reward critic and an STL-reward critic,
// an actor, and the Lagrange multiplier kappa coupling them.

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stlrl/lagrangian.hpp"
#include "stlrl/nn.hpp"
#include "stlrl/replay_buffer.hpp"
#include "stlrl/rng.hpp"

namespace stlrl {

enum class Algorithm { Sac, Ddpg, Td3 };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);

/// Pre-training optimizes the STL critic alone; fine-tuning the full Lagrangian.
enum class Phase { Pretrain, Finetune };

struct AgentConfig {
  Algorithm algorithm = Algorithm::Sac;
  std::size_t obs_dim = 0;
  std::size_t action_dim = 0;
  std::vector<std::size_t> hidden{256, 256};
  double gamma = 0.99;
  double xi = 0.01;              // soft update rate
  double lr = 3e-4;              // actor and critics
  double alpha_lr = 3e-4;
  double kappa_lr = 1e-5;
  double kappa0 = 1.0;
  double alpha0 = 1.0;
  double l_stl = 0.0;
  double target_entropy = -2.0;  // H0
  double target_noise = 0.2;     // TD3 smoothing std
  double target_noise_clip = 0.5;
  std::size_t policy_delay = 2;  // TD3
  OuParams ou{};

  /// Everything except the network sizes.
  void validate_rates() const;
  void validate() const;
};

struct UpdateStats {
  double actor_loss = 0.0;
  double critic_r_loss = 0.0;
  double critic_s_loss = 0.0;
  bool actor_updated = false;
};

class Agent {
 public:
  explicit Agent(AgentConfig config);
  virtual ~Agent() = default;

  const AgentConfig& config() const { return config_; }
  double kappa() const { return kappa_.value(); }
  /// Entropy temperature; zero for the deterministic-policy agents.
  virtual double alpha() const { return 0.0; }
  std::size_t updates() const { return updates_; }

  /// Resets per-episode exploration state.
  virtual void begin_episode() {}
  /// Exploratory action for a single observation.
  virtual std::vector<double> explore(std::span<const double> obs, Rng& rng) = 0;
  /// Deterministic actions for a batch of observations (action_dim x B).
  virtual nn::Matrix act(const nn::Matrix& obs) const = 0;
  std::vector<double> act(std::span<const double> obs) const;

  /// One learning step on a mini-batch, including the target soft update.
  virtual UpdateStats update(const Batch& batch, Phase phase, Rng& rng) = 0;

  /// Q_s at initial observations under the current policy (one value per column).
  virtual nn::RowVector initial_stl_values(const nn::Matrix& initial_obs, Rng& rng) const = 0;
  /// Descends J_L(kappa) on a batch of initial observations; returns the new kappa.
  double update_kappa(const nn::Matrix& initial_obs, Rng& rng);

  virtual std::unique_ptr<Agent> clone() const = 0;

  void save(std::ostream& os) const;
  void load(std::istream& is);

 protected:
  virtual void save_state(std::ostream& os) const = 0;
  virtual void load_state(std::istream& is) = 0;

  AgentConfig config_;
  ProjectedScalar kappa_;
  std::size_t updates_ = 0;
};

std::unique_ptr<Agent> make_agent(const AgentConfig& config, Rng& init_rng);

/// in -> hidden (ReLU) -> out with the given output activation, initialized from rng.
nn::Mlp make_mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
                 nn::Activation output, Rng& rng);

/// Critic input [obs; action].
nn::Matrix critic_input(const nn::Matrix& obs, const nn::Matrix& action);

/// Mean squared TD error of `critic` against fixed targets, with one Adam step.
double critic_step(nn::Mlp& critic, nn::Adam& adam, const nn::Matrix& input,
                   const nn::RowVector& targets);

/// Thrown when a loss or parameter goes non-finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stlrl
