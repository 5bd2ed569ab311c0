#include "stlrl/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

namespace stlrl {

double smoothing_perturbation(double eps, double sigma, double clip) {
  return std::clamp(sigma * eps, -clip, clip);
}

namespace {

nn::AdamOptions adam_with(double lr) { return nn::AdamOptions{.lr = lr}; }

nn::RowVector min_over(const std::vector<nn::Mlp>& q, const nn::Matrix& x) {
  nn::RowVector v = q[0].forward(x).row(0);
  for (std::size_t i = 1; i < q.size(); ++i) v = v.cwiseMin(q[i].forward(x).row(0));
  return v;
}

// Adds weight * dQ(obs, a)/da / B to grad_action for the first critic; returns weight * mean(Q).
double accumulate(const nn::Mlp& q, const nn::Matrix& input, double weight, std::size_t action_dim,
                  nn::Matrix& grad_action) {
  nn::Tape t;
  const nn::Matrix v = q.forward(input, &t);
  const nn::Matrix g = nn::Matrix::Constant(1, input.cols(), weight / static_cast<double>(input.cols()));
  grad_action += q.input_gradient(t, g).bottomRows(static_cast<Eigen::Index>(action_dim));
  return weight * v.mean();
}

}  // namespace

DdpgAgent::DdpgAgent(AgentConfig config, Rng& init_rng)
    : Agent(std::move(config)), ou_(config_.action_dim, config_.ou) {
  if (config_.algorithm == Algorithm::Sac) throw std::invalid_argument("DdpgAgent cannot run SAC");
  const auto& c = config_;
  actor_ = make_mlp(c.obs_dim, c.hidden, c.action_dim, nn::Activation::Tanh, init_rng);
  actor_target_ = actor_;
  const int critics = twin() ? 2 : 1;
  for (int i = 0; i < critics; ++i)
    qr_.push_back(make_mlp(c.obs_dim + c.action_dim, c.hidden, 1, nn::Activation::Identity, init_rng));
  for (int i = 0; i < critics; ++i)
    qs_.push_back(make_mlp(c.obs_dim + c.action_dim, c.hidden, 1, nn::Activation::Identity, init_rng));
  qr_target_ = qr_;
  qs_target_ = qs_;
  actor_opt_ = nn::Adam(actor_.params(), adam_with(c.lr));
  for (int i = 0; i < critics; ++i) {
    qr_opt_.emplace_back(qr_[i].params(), adam_with(c.lr));
    qs_opt_.emplace_back(qs_[i].params(), adam_with(c.lr));
  }
}

std::vector<double> DdpgAgent::explore(std::span<const double> obs, Rng& rng) {
  std::vector<double> a = act(obs);
  const auto& w = ou_.step(rng);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::clamp(a[i] + w[i], -1.0, 1.0);
  return a;
}

nn::Matrix DdpgAgent::act(const nn::Matrix& obs) const { return actor_.forward(obs); }

std::pair<nn::RowVector, nn::RowVector> DdpgAgent::critic_targets(
    const Batch& batch, const nn::Matrix& smoothing_eps) const {
  nn::Matrix a = actor_target_.forward(batch.next_obs);
  if (twin()) {
    if (smoothing_eps.rows() != a.rows() || smoothing_eps.cols() != a.cols())
      throw std::invalid_argument("TD3: smoothing noise shape differs from the action batch");
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        a(i, j) = std::clamp(a(i, j) + smoothing_perturbation(smoothing_eps(i, j), config_.target_noise,
                                                              config_.target_noise_clip),
                             -1.0, 1.0);
  }
  const nn::Matrix x = critic_input(batch.next_obs, a);
  const double g = config_.gamma;
  nn::RowVector yr = batch.reward + g * min_over(qr_target_, x);
  nn::RowVector ys = batch.stl_reward + g * min_over(qs_target_, x);
  return {std::move(yr), std::move(ys)};
}

ActorGradient DdpgAgent::actor_gradient(const nn::Matrix& obs, Phase phase) const {
  nn::Tape tape;
  const nn::Matrix a = actor_.forward(obs, &tape);
  const nn::Matrix x = critic_input(obs, a);
  nn::Matrix dvalue_da = nn::Matrix::Zero(a.rows(), a.cols());
  double value = 0.0;
  if (phase == Phase::Finetune) {
    value += accumulate(qr_[0], x, 1.0, config_.action_dim, dvalue_da);
    value += accumulate(qs_[0], x, kappa(), config_.action_dim, dvalue_da);
  } else {
    value += accumulate(qs_[0], x, 1.0, config_.action_dim, dvalue_da);
  }
  ActorGradient out;
  out.loss = -value;
  out.grads = actor_.backward(tape, -dvalue_da);
  return out;
}

UpdateStats DdpgAgent::update(const Batch& batch, Phase phase, Rng& rng) {
  nn::Matrix eps;
  if (twin()) eps = nn::standard_normal(config_.action_dim, batch.size(), rng);
  return update_with_noise(batch, phase, eps);
}

UpdateStats DdpgAgent::update_with_noise(const Batch& batch, Phase phase,
                                         const nn::Matrix& smoothing_eps) {
  if (batch.size() == 0) throw std::invalid_argument("DDPG update on an empty batch");
  ++updates_;
  UpdateStats st;
  const auto [yr, ys] = critic_targets(batch, smoothing_eps);
  const nn::Matrix x = critic_input(batch.obs, batch.action);
  const double n = static_cast<double>(qr_.size());
  for (std::size_t i = 0; i < qr_.size(); ++i) {
    st.critic_r_loss += critic_step(qr_[i], qr_opt_[i], x, yr) / n;
    st.critic_s_loss += critic_step(qs_[i], qs_opt_[i], x, ys) / n;
  }

  const std::size_t delay = twin() ? config_.policy_delay : 1;
  if (updates_ % delay == 0) {
    const ActorGradient g = actor_gradient(batch.obs, phase);
    if (!std::isfinite(g.loss)) throw DivergenceError("actor loss is not finite");
    actor_opt_.step(actor_, g.grads);
    st.actor_loss = g.loss;
    st.actor_updated = true;

    nn::soft_update(actor_target_, actor_, config_.xi);
    for (std::size_t i = 0; i < qr_.size(); ++i) {
      nn::soft_update(qr_target_[i], qr_[i], config_.xi);
      nn::soft_update(qs_target_[i], qs_[i], config_.xi);
    }
  }
  return st;
}

nn::RowVector DdpgAgent::initial_stl_values(const nn::Matrix& initial_obs, Rng&) const {
  const nn::Matrix x = critic_input(initial_obs, actor_.forward(initial_obs));
  return qs_[0].forward(x).row(0);
}

void DdpgAgent::save_state(std::ostream& os) const {
  nn::write_mlp(os, actor_);
  nn::write_mlp(os, actor_target_);
  for (const auto* group : {&qr_, &qs_, &qr_target_, &qs_target_})
    for (const auto& net : *group) nn::write_mlp(os, net);
  actor_opt_.save(os);
  for (const auto* group : {&qr_opt_, &qs_opt_})
    for (const auto& opt : *group) opt.save(os);
  for (double w : ou_.state()) nn::write_f64(os, w);
}

void DdpgAgent::load_state(std::istream& is) {
  nn::read_mlp(is, actor_);
  nn::read_mlp(is, actor_target_);
  for (auto* group : {&qr_, &qs_, &qr_target_, &qs_target_})
    for (auto& net : *group) nn::read_mlp(is, net);
  actor_opt_.load(is);
  for (auto* group : {&qr_opt_, &qs_opt_})
    for (auto& opt : *group) opt.load(is);
  std::vector<double> omega(config_.action_dim);
  for (auto& w : omega) w = nn::read_f64(is);
  ou_.set_state(std::move(omega));
}

}  // namespace stlrl
