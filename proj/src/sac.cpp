#include "stlrl/sac.hpp"

#include <cmath>
#include <istream>
#include <ostream>

namespace stlrl {

namespace {

nn::Mlp make_critic(const AgentConfig& c, Rng& rng) {
  return make_mlp(c.obs_dim + c.action_dim, c.hidden, 1, nn::Activation::Identity, rng);
}

nn::AdamOptions adam_with(double lr) { return nn::AdamOptions{.lr = lr}; }

// Elementwise min of two critics' outputs, remembering which one was taken.
struct TwinMin {
  nn::RowVector value;
  std::vector<bool> first;
};

TwinMin twin_min(const nn::Matrix& q1, const nn::Matrix& q2) {
  TwinMin m;
  m.value.resize(q1.cols());
  m.first.resize(static_cast<std::size_t>(q1.cols()));
  for (Eigen::Index b = 0; b < q1.cols(); ++b) {
    m.first[b] = q1(0, b) <= q2(0, b);
    m.value(b) = m.first[b] ? q1(0, b) : q2(0, b);
  }
  return m;
}

// Adds weight * d min(Q1, Q2)(obs, a) / da / B to grad_action; returns weight * mean(min).
double accumulate_twin(const std::array<nn::Mlp, 2>& q, const nn::Matrix& input, double weight,
                       std::size_t action_dim, nn::Matrix& grad_action) {
  nn::Tape t1, t2;
  const nn::Matrix v1 = q[0].forward(input, &t1);
  const nn::Matrix v2 = q[1].forward(input, &t2);
  const TwinMin m = twin_min(v1, v2);
  const double n = static_cast<double>(input.cols());
  nn::Matrix g1 = nn::Matrix::Zero(1, input.cols()), g2 = g1;
  for (Eigen::Index b = 0; b < input.cols(); ++b) (m.first[b] ? g1 : g2)(0, b) = weight / n;
  const auto rows = static_cast<Eigen::Index>(action_dim);
  grad_action += q[0].input_gradient(t1, g1).bottomRows(rows);
  grad_action += q[1].input_gradient(t2, g2).bottomRows(rows);
  return weight * m.value.mean();
}

}  // namespace

SacAgent::SacAgent(AgentConfig config, Rng& init_rng)
    : Agent(std::move(config)), alpha_(config_.alpha0, adam_with(config_.alpha_lr)) {
  const auto& c = config_;
  actor_ = make_mlp(c.obs_dim, c.hidden, 2 * c.action_dim, nn::Activation::Identity, init_rng);
  for (int i = 0; i < 2; ++i) qr_[i] = make_critic(c, init_rng);
  for (int i = 0; i < 2; ++i) qs_[i] = make_critic(c, init_rng);
  qr_target_ = qr_;
  qs_target_ = qs_;
  actor_opt_ = nn::Adam(actor_.params(), adam_with(c.lr));
  for (int i = 0; i < 2; ++i) {
    qr_opt_[i] = nn::Adam(qr_[i].params(), adam_with(c.lr));
    qs_opt_[i] = nn::Adam(qs_[i].params(), adam_with(c.lr));
  }
}

std::vector<double> SacAgent::explore(std::span<const double> obs, Rng& rng) {
  nn::Matrix x = Eigen::Map<const nn::Vector>(obs.data(), static_cast<Eigen::Index>(obs.size()));
  const auto head = nn::GaussianHead::from_output(actor_.forward(x));
  const auto s = nn::sample_squashed_gaussian(head, nn::standard_normal(config_.action_dim, 1, rng));
  return {s.action.data(), s.action.data() + s.action.size()};
}

nn::Matrix SacAgent::act(const nn::Matrix& obs) const {
  const auto head = nn::GaussianHead::from_output(actor_.forward(obs));
  return head.mean.array().tanh().matrix();
}

std::pair<nn::RowVector, nn::RowVector> SacAgent::critic_targets(
    const Batch& batch, Phase phase, const nn::Matrix& next_noise) const {
  const auto head = nn::GaussianHead::from_output(actor_.forward(batch.next_obs));
  const auto s = nn::sample_squashed_gaussian(head, next_noise);
  const nn::Matrix x = critic_input(batch.next_obs, s.action);
  const TwinMin qr = twin_min(qr_target_[0].forward(x), qr_target_[1].forward(x));
  const TwinMin qs = twin_min(qs_target_[0].forward(x), qs_target_[1].forward(x));
  const nn::RowVector entropy_term = alpha() * s.log_prob;
  const double g = config_.gamma;
  nn::RowVector yr = batch.reward + g * (qr.value - entropy_term);
  nn::RowVector ys = phase == Phase::Pretrain ? nn::RowVector(batch.stl_reward + g * (qs.value - entropy_term))
                                              : nn::RowVector(batch.stl_reward + g * qs.value);
  return {std::move(yr), std::move(ys)};
}

ActorGradient SacAgent::actor_gradient(const nn::Matrix& obs, const nn::Matrix& noise,
                                       Phase phase) const {
  nn::Tape tape;
  const auto head = nn::GaussianHead::from_output(actor_.forward(obs, &tape));
  const auto s = nn::sample_squashed_gaussian(head, noise);
  const nn::Matrix x = critic_input(obs, s.action);
  const auto n_a = config_.action_dim;
  const double n = static_cast<double>(obs.cols());

  // The loss is mean(alpha log pi) - value; d(-value)/da is accumulated with a sign flip below.
  nn::Matrix dvalue_da = nn::Matrix::Zero(static_cast<Eigen::Index>(n_a), obs.cols());
  double value = 0.0;
  if (phase == Phase::Finetune) {
    value += accumulate_twin(qr_, x, 1.0, n_a, dvalue_da);
    value += accumulate_twin(qs_, x, kappa(), n_a, dvalue_da);
  } else {
    value += accumulate_twin(qs_, x, 1.0, n_a, dvalue_da);
  }
  ActorGradient out;
  out.log_prob = s.log_prob;
  out.loss = alpha() * s.log_prob.mean() - value;
  const nn::RowVector dlogp = nn::RowVector::Constant(obs.cols(), alpha() / n);
  const nn::Matrix graw = nn::squashed_gaussian_backward(head, s, -dvalue_da, dlogp);
  out.grads = actor_.backward(tape, graw);
  return out;
}

ActorGradient SacAgent::actor_step(const nn::Matrix& obs, const nn::Matrix& noise, Phase phase) {
  ActorGradient g = actor_gradient(obs, noise, phase);
  if (!std::isfinite(g.loss)) throw DivergenceError("actor loss is not finite");
  actor_opt_.step(actor_, g.grads);
  return g;
}

double SacAgent::alpha_step(const nn::RowVector& log_prob) {
  return alpha_update(alpha_, std::span<const double>(log_prob.data(), static_cast<std::size_t>(log_prob.size())),
                      config_.target_entropy);
}

UpdateStats SacAgent::update(const Batch& batch, Phase phase, Rng& rng) {
  const auto b = batch.size();
  const nn::Matrix next_noise = nn::standard_normal(config_.action_dim, b, rng);
  const nn::Matrix noise = nn::standard_normal(config_.action_dim, b, rng);
  return update_with_noise(batch, phase, next_noise, noise);
}

UpdateStats SacAgent::update_with_noise(const Batch& batch, Phase phase,
                                        const nn::Matrix& next_noise, const nn::Matrix& noise) {
  if (batch.size() == 0) throw std::invalid_argument("SAC update on an empty batch");
  ++updates_;
  UpdateStats st;
  const auto [yr, ys] = critic_targets(batch, phase, next_noise);
  const nn::Matrix x = critic_input(batch.obs, batch.action);
  st.critic_r_loss = 0.5 * (critic_step(qr_[0], qr_opt_[0], x, yr) + critic_step(qr_[1], qr_opt_[1], x, yr));
  st.critic_s_loss = 0.5 * (critic_step(qs_[0], qs_opt_[0], x, ys) + critic_step(qs_[1], qs_opt_[1], x, ys));

  const ActorGradient g = actor_step(batch.obs, noise, phase);
  st.actor_loss = g.loss;
  st.actor_updated = true;
  alpha_step(g.log_prob);

  for (int i = 0; i < 2; ++i) {
    nn::soft_update(qr_target_[i], qr_[i], config_.xi);
    nn::soft_update(qs_target_[i], qs_[i], config_.xi);
  }
  return st;
}

nn::RowVector SacAgent::initial_stl_values(const nn::Matrix& initial_obs, Rng& rng) const {
  const auto head = nn::GaussianHead::from_output(actor_.forward(initial_obs));
  const auto s = nn::sample_squashed_gaussian(
      head, nn::standard_normal(config_.action_dim, static_cast<std::size_t>(initial_obs.cols()), rng));
  const nn::Matrix x = critic_input(initial_obs, s.action);
  return twin_min(qs_[0].forward(x), qs_[1].forward(x)).value;
}

void SacAgent::save_state(std::ostream& os) const {
  nn::write_mlp(os, actor_);
  for (const auto* group : {&qr_, &qs_, &qr_target_, &qs_target_})
    for (const auto& net : *group) nn::write_mlp(os, net);
  actor_opt_.save(os);
  for (const auto* group : {&qr_opt_, &qs_opt_})
    for (const auto& opt : *group) opt.save(os);
  alpha_.save(os);
}

void SacAgent::load_state(std::istream& is) {
  nn::read_mlp(is, actor_);
  for (auto* group : {&qr_, &qs_, &qr_target_, &qs_target_})
    for (auto& net : *group) nn::read_mlp(is, net);
  actor_opt_.load(is);
  for (auto* group : {&qr_opt_, &qs_opt_})
    for (auto& opt : *group) opt.load(is);
  alpha_.load(is);
}

}  // namespace stlrl
