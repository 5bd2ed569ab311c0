#pragma once

#include <array>

#include "stlrl/agent.hpp"

namespace stlrl {

/// Actor loss, its parameter gradient, and the log-probabilities of the
/// actions it was evaluated at.
struct ActorGradient {
  double loss = 0.0;
  nn::Params grads;
  nn::RowVector log_prob;
};

/// SAC-Lagrangian: squashed-Gaussian actor, twin reward critics and twin
/// STL critics (clipped double Q on both), automatic entropy temperature.
class SacAgent final : public Agent {
 public:
  SacAgent(AgentConfig config, Rng& init_rng);

  double alpha() const override { return alpha_.value(); }

  std::vector<double> explore(std::span<const double> obs, Rng& rng) override;
  nn::Matrix act(const nn::Matrix& obs) const override;
  using Agent::act;

  UpdateStats update(const Batch& batch, Phase phase, Rng& rng) override;
  /// Same step with explicit reparameterization noise for z' and z.
  UpdateStats update_with_noise(const Batch& batch, Phase phase, const nn::Matrix& next_noise,
                                const nn::Matrix& noise);

  /// TD targets (reward, STL) for a batch.
  std::pair<nn::RowVector, nn::RowVector> critic_targets(const Batch& batch, Phase phase,
                                                         const nn::Matrix& next_noise) const;
  ActorGradient actor_gradient(const nn::Matrix& obs, const nn::Matrix& noise, Phase phase) const;
  /// One Adam step on the actor; returns the pre-step loss and log-probabilities.
  ActorGradient actor_step(const nn::Matrix& obs, const nn::Matrix& noise, Phase phase);
  double alpha_step(const nn::RowVector& log_prob);

  nn::RowVector initial_stl_values(const nn::Matrix& initial_obs, Rng& rng) const override;

  std::unique_ptr<Agent> clone() const override { return std::make_unique<SacAgent>(*this); }

  nn::Mlp& actor() { return actor_; }
  const nn::Mlp& actor() const { return actor_; }
  std::array<nn::Mlp, 2>& reward_critics() { return qr_; }
  std::array<nn::Mlp, 2>& stl_critics() { return qs_; }
  std::array<nn::Mlp, 2>& reward_targets() { return qr_target_; }
  std::array<nn::Mlp, 2>& stl_targets() { return qs_target_; }
  const std::array<nn::Mlp, 2>& reward_targets() const { return qr_target_; }
  const std::array<nn::Mlp, 2>& stl_targets() const { return qs_target_; }

 private:
  void save_state(std::ostream& os) const override;
  void load_state(std::istream& is) override;

  nn::Mlp actor_;
  std::array<nn::Mlp, 2> qr_, qs_, qr_target_, qs_target_;
  nn::Adam actor_opt_;
  std::array<nn::Adam, 2> qr_opt_, qs_opt_;
  ProjectedScalar alpha_;
};

}  // namespace stlrl
