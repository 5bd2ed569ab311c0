#include "stlrl/trainer.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace stlrl {

void TrainConfig::validate(std::size_t tau) const {
  if (total_steps == 0) throw std::invalid_argument("total_steps must be positive");
  if (episode_length == 0) throw std::invalid_argument("episode_length must be positive");
  if (episode_length < tau)
    throw std::invalid_argument("episode_length " + std::to_string(episode_length) +
                                " is shorter than tau = " + std::to_string(tau));
  if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
  if (buffer_capacity < batch_size)
    throw std::invalid_argument("buffer_capacity must hold at least one batch");
  if (metrics_interval == 0) throw std::invalid_argument("metrics_interval must be positive");
}

// Batch activations are just over glibc's default mmap threshold, which would
// otherwise turn every temporary into an mmap/munmap pair.
static void keep_batch_buffers_on_heap() {
#if defined(__GLIBC__)
  static const bool done = [] {
    mallopt(M_MMAP_THRESHOLD, 16 << 20);
    mallopt(M_TRIM_THRESHOLD, 256 << 20);
    return true;
  }();
  (void)done;
#endif
}

Trainer::Trainer(TauCmdp env, AgentConfig agent_config, TrainConfig config, std::uint64_t seed)
    : env_(std::move(env)),
      config_(config),
      buffer_((config.validate(env_.tau()), config.buffer_capacity), env_.observation_dim(),
              env_.action_dim()),
      env_rng_(derive_seed(seed, "env")),
      policy_rng_(derive_seed(seed, "policy")),
      sample_rng_(derive_seed(seed, "replay")),
      update_rng_(derive_seed(seed, "update")),
      kappa_rng_(derive_seed(seed, "kappa")) {
  keep_batch_buffers_on_heap();
  agent_config.obs_dim = env_.observation_dim();
  agent_config.action_dim = env_.action_dim();
  Rng init(derive_seed(seed, "init"));
  agent_ = make_agent(agent_config, init);
}

nn::Matrix Trainer::initial_batch(std::size_t count) {
  nn::Matrix m(static_cast<Eigen::Index>(env_.observation_dim()), static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    const auto x0 = env_.plant().reset(kappa_rng_);
    const auto obs = env_.initial_observation(x0);
    for (std::size_t i = 0; i < obs.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = obs[i];
  }
  return m;
}

void Trainer::run(const TrainHooks& hooks) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  while (steps_ < config_.total_steps) {
    std::vector<double> obs = env_.reset(env_rng_);
    agent_->begin_episode();
    MetricsRow row;
    double actor_sum = 0.0, critic_r_sum = 0.0, critic_s_sum = 0.0;
    std::size_t actor_n = 0, learn_n = 0;
    std::size_t k = 0;
    for (; k < config_.episode_length && steps_ < config_.total_steps; ++k) {
      const std::vector<double> action = agent_->explore(obs, policy_rng_);
      Transition tr = env_.step(action, env_rng_);
      buffer_.push(obs, action, tr.next_observation, tr.reward, tr.stl_reward);
      row.sum_reward += tr.reward;
      row.sum_stl_reward += tr.stl_reward;

      if (buffer_.size() >= config_.batch_size) {
        const Phase ph = phase();
        try {
          const Batch batch = buffer_.sample(config_.batch_size, sample_rng_);
          const UpdateStats st = agent_->update(batch, ph, update_rng_);
          if (ph == Phase::Finetune) agent_->update_kappa(initial_batch(config_.batch_size), kappa_rng_);
          critic_r_sum += st.critic_r_loss;
          critic_s_sum += st.critic_s_loss;
          ++learn_n;
          if (st.actor_updated) {
            actor_sum += st.actor_loss;
            ++actor_n;
          }
          if (!std::isfinite(agent_->kappa()) || !std::isfinite(agent_->alpha()))
            throw DivergenceError("multiplier left the finite range");
        } catch (const std::runtime_error& e) {
          std::ostringstream msg;
          msg << "training diverged at step " << steps_ << " (episode " << episodes_ << ", "
              << (ph == Phase::Pretrain ? "pre-training" : "fine-tuning") << "): " << e.what()
              << "; kappa=" << agent_->kappa() << " alpha=" << agent_->alpha();
          throw DivergenceError(msg.str());
        }
      }
      obs = std::move(tr.next_observation);
      ++steps_;
      if (hooks.on_step) hooks.on_step(steps_, *agent_);
      if (config_.eval_interval && steps_ % config_.eval_interval == 0 && hooks.on_eval)
        hooks.on_eval(steps_, *agent_);
    }
    if (k < config_.episode_length) break;  // budget ran out mid-episode
    ++episodes_;
    if (episodes_ % config_.metrics_interval == 0 && hooks.on_metrics) {
      row.step = steps_;
      row.episode = episodes_;
      row.kappa = agent_->kappa();
      row.alpha = agent_->alpha();
      row.actor_loss = actor_n ? actor_sum / static_cast<double>(actor_n) : nan;
      row.critic_r_loss = learn_n ? critic_r_sum / static_cast<double>(learn_n) : nan;
      row.critic_s_loss = learn_n ? critic_s_sum / static_cast<double>(learn_n) : nan;
      hooks.on_metrics(row);
    }
  }
}

static constexpr std::uint64_t kTrainerMagic = 0x3154504B43524C53ULL;  // "SLRCKPT1"

void Trainer::save(std::ostream& os) const {
  nn::write_u64(os, kTrainerMagic);
  nn::write_u64(os, steps_);
  nn::write_u64(os, episodes_);
  for (const Rng* r : {&env_rng_, &policy_rng_, &sample_rng_, &update_rng_, &kappa_rng_}) r->save(os);
  agent_->save(os);
}

void Trainer::load(std::istream& is) {
  if (nn::read_u64(is) != kTrainerMagic) throw std::runtime_error("not a training checkpoint");
  steps_ = nn::read_u64(is);
  episodes_ = nn::read_u64(is);
  for (Rng* r : {&env_rng_, &policy_rng_, &sample_rng_, &update_rng_, &kappa_rng_}) r->load(is);
  agent_->load(is);
}

void Trainer::load_agent(std::istream& is, Agent& agent) {
  if (nn::read_u64(is) != kTrainerMagic) throw std::runtime_error("not a training checkpoint");
  nn::read_u64(is);
  nn::read_u64(is);
  Rng skip;
  for (int i = 0; i < 5; ++i) skip.load(is);
  agent.load(is);
}

}  // namespace stlrl
