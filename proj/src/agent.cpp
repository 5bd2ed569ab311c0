#include "stlrl/agent.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "stlrl/ddpg.hpp"
#include "stlrl/sac.hpp"

namespace stlrl {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Sac: return "sac";
    case Algorithm::Ddpg: return "ddpg";
    case Algorithm::Td3: return "td3";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "sac") return Algorithm::Sac;
  if (name == "ddpg") return Algorithm::Ddpg;
  if (name == "td3") return Algorithm::Td3;
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (expected sac, ddpg or td3)");
}

void AgentConfig::validate() const {
  if (obs_dim == 0 || action_dim == 0) throw std::invalid_argument("agent: zero input or action size");
  validate_rates();
}

void AgentConfig::validate_rates() const {
  if (hidden.empty()) throw std::invalid_argument("agent: at least one hidden layer is required");
  for (auto h : hidden)
    if (h == 0) throw std::invalid_argument("agent: hidden layers must be non-empty");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("agent: gamma must lie in [0, 1]");
  if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("agent: xi must lie in (0, 1]");
  if (!(lr > 0.0 && alpha_lr > 0.0 && kappa_lr > 0.0))
    throw std::invalid_argument("agent: learning rates must be positive");
  if (!(kappa0 >= 0.0 && alpha0 >= 0.0))
    throw std::invalid_argument("agent: initial kappa and alpha must be non-negative");
  if (!std::isfinite(l_stl) || !std::isfinite(target_entropy))
    throw std::invalid_argument("agent: l_stl and the entropy target must be finite");
  if (!(target_noise >= 0.0 && target_noise_clip >= 0.0))
    throw std::invalid_argument("agent: smoothing noise parameters must be non-negative");
  if (policy_delay == 0) throw std::invalid_argument("agent: policy delay must be at least 1");
}

Agent::Agent(AgentConfig config)
    : config_((config.validate(), std::move(config))),
      kappa_(config_.kappa0, nn::AdamOptions{.lr = config_.kappa_lr}) {}

std::vector<double> Agent::act(std::span<const double> obs) const {
  nn::Matrix x = Eigen::Map<const nn::Vector>(obs.data(), static_cast<Eigen::Index>(obs.size()));
  nn::Matrix a = act(x);
  return {a.data(), a.data() + a.size()};
}

double Agent::update_kappa(const nn::Matrix& initial_obs, Rng& rng) {
  const nn::RowVector q = initial_stl_values(initial_obs, rng);
  return kappa_update(kappa_, std::span<const double>(q.data(), static_cast<std::size_t>(q.size())),
                      config_.l_stl);
}

static constexpr std::uint64_t kAgentMagic = 0x31474e4741524c53ULL;  // "SLRAGNG1"

void Agent::save(std::ostream& os) const {
  nn::write_u64(os, kAgentMagic);
  nn::write_string(os, to_string(config_.algorithm));
  nn::write_u64(os, config_.obs_dim);
  nn::write_u64(os, config_.action_dim);
  nn::write_u64(os, config_.hidden.size());
  for (auto h : config_.hidden) nn::write_u64(os, h);
  nn::write_u64(os, updates_);
  kappa_.save(os);
  save_state(os);
}

void Agent::load(std::istream& is) {
  if (nn::read_u64(is) != kAgentMagic) throw std::runtime_error("checkpoint: not an agent record");
  const std::string algo = nn::read_string(is);
  if (algo != to_string(config_.algorithm))
    throw std::runtime_error("checkpoint holds a " + algo + " agent, configuration asks for " +
                             to_string(config_.algorithm));
  const auto obs = nn::read_u64(is), act = nn::read_u64(is);
  if (obs != config_.obs_dim || act != config_.action_dim)
    throw std::runtime_error("checkpoint dimensions (" + std::to_string(obs) + " inputs, " +
                             std::to_string(act) + " actions) do not match the configuration (" +
                             std::to_string(config_.obs_dim) + ", " +
                             std::to_string(config_.action_dim) + ")");
  const auto layers = nn::read_u64(is);
  if (layers != config_.hidden.size()) throw std::runtime_error("checkpoint: hidden layer count mismatch");
  for (auto h : config_.hidden)
    if (nn::read_u64(is) != h) throw std::runtime_error("checkpoint: hidden width mismatch");
  updates_ = nn::read_u64(is);
  kappa_.load(is);
  load_state(is);
}

std::unique_ptr<Agent> make_agent(const AgentConfig& config, Rng& init_rng) {
  if (config.algorithm == Algorithm::Sac) return std::make_unique<SacAgent>(config, init_rng);
  return std::make_unique<DdpgAgent>(config, init_rng);
}

nn::Mlp make_mlp(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out,
                 nn::Activation output, Rng& rng) {
  std::vector<std::size_t> sizes{in};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(out);
  nn::Mlp net(sizes, nn::Activation::Relu, output);
  net.initialize(rng);
  return net;
}

nn::Matrix critic_input(const nn::Matrix& obs, const nn::Matrix& action) {
  if (obs.cols() != action.cols()) throw std::invalid_argument("critic input: batch size mismatch");
  nn::Matrix x(obs.rows() + action.rows(), obs.cols());
  x.topRows(obs.rows()) = obs;
  x.bottomRows(action.rows()) = action;
  return x;
}

double critic_step(nn::Mlp& critic, nn::Adam& adam, const nn::Matrix& input,
                   const nn::RowVector& targets) {
  nn::Tape tape;
  const nn::Matrix q = critic.forward(input, &tape);
  const nn::RowVector diff = q.row(0) - targets;
  const double n = static_cast<double>(diff.size());
  const double loss = diff.squaredNorm() / n;
  if (!std::isfinite(loss)) throw DivergenceError("critic loss is not finite");
  const nn::Matrix grad = (2.0 / n) * diff;
  adam.step(critic, critic.backward(tape, grad));
  return loss;
}

}  // namespace stlrl
