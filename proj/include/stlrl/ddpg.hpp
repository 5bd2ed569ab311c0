#pragma once

#include "stlrl/agent.hpp"
#include "stlrl/sac.hpp"

namespace stlrl {

/// clamp(sigma * eps, -clip, clip): the TD3 target-policy smoothing perturbation.
double smoothing_perturbation(double eps, double sigma, double clip);

/// DDPG-Lagrangian and, with twin critics, target smoothing and delayed
/// actor updates, TD3-Lagrangian. Exploration adds OU noise to mu(z).
class DdpgAgent final : public Agent {
 public:
  DdpgAgent(AgentConfig config, Rng& init_rng);

  bool twin() const { return config_.algorithm == Algorithm::Td3; }

  void begin_episode() override { ou_.reset(); }
  std::vector<double> explore(std::span<const double> obs, Rng& rng) override;
  nn::Matrix act(const nn::Matrix& obs) const override;
  using Agent::act;

  UpdateStats update(const Batch& batch, Phase phase, Rng& rng) override;
  /// Same step with explicit smoothing innovations (ignored for DDPG).
  UpdateStats update_with_noise(const Batch& batch, Phase phase, const nn::Matrix& smoothing_eps);

  std::pair<nn::RowVector, nn::RowVector> critic_targets(const Batch& batch,
                                                         const nn::Matrix& smoothing_eps) const;
  ActorGradient actor_gradient(const nn::Matrix& obs, Phase phase) const;

  nn::RowVector initial_stl_values(const nn::Matrix& initial_obs, Rng& rng) const override;

  std::unique_ptr<Agent> clone() const override { return std::make_unique<DdpgAgent>(*this); }

  nn::Mlp& actor() { return actor_; }
  const nn::Mlp& actor() const { return actor_; }
  const nn::Mlp& actor_target() const { return actor_target_; }
  std::vector<nn::Mlp>& reward_critics() { return qr_; }
  std::vector<nn::Mlp>& stl_critics() { return qs_; }
  std::vector<nn::Mlp>& reward_targets() { return qr_target_; }
  std::vector<nn::Mlp>& stl_targets() { return qs_target_; }
  const std::vector<nn::Mlp>& reward_targets() const { return qr_target_; }
  const std::vector<nn::Mlp>& stl_targets() const { return qs_target_; }
  OuNoise& ou() { return ou_; }

 private:
  void save_state(std::ostream& os) const override;
  void load_state(std::istream& is) override;

  nn::Mlp actor_, actor_target_;
  std::vector<nn::Mlp> qr_, qs_, qr_target_, qs_target_;
  nn::Adam actor_opt_;
  std::vector<nn::Adam> qr_opt_, qs_opt_;
  OuNoise ou_;
};

}  // namespace stlrl
