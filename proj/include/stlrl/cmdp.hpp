#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "stlrl/plant.hpp"
#include "stlrl/preprocess.hpp"
#include "stlrl/stl.hpp"
#include "stlrl/tau_env.hpp"

namespace stlrl {

struct Transition {
  std::vector<double> next_observation;
  double reward = 0.0;      // R(z[tau-1], a), the pre-transition state
  double stl_reward = 0.0;  // R_STL(z), the pre-transition window
};

/// The tau-CMDP seen by an agent: a plant, the sliding window over its
/// states, the STL reward of the window, and the network observation
/// (pre-processed or flattened).
class TauCmdp {
 public:
  TauCmdp(std::shared_ptr<const Plant> plant, stl::FragmentInfo fragment, double beta,
          bool preprocess);

  std::size_t observation_dim() const { return preprocessor_.input_dim(); }
  std::size_t action_dim() const { return plant_->action_dim(); }
  std::size_t tau() const { return fragment_.tau; }
  const stl::FragmentInfo& fragment() const { return fragment_; }
  const Plant& plant() const { return *plant_; }
  const Preprocessor& preprocessor() const { return preprocessor_; }

  /// Starts an episode from x0 ~ p_0; returns the first observation.
  const std::vector<double>& reset(Rng& rng);
  const std::vector<double>& reset_to(std::span<const double> x0);

  Transition step(std::span<const double> action, Rng& rng);

  /// Observation of the padded initial window built from x0 (a draw from p_0^z).
  std::vector<double> initial_observation(std::span<const double> x0) const;

  const ExtendedState& window() const { return *window_; }
  const std::vector<double>& flags() const { return flags_; }
  const std::vector<double>& observation() const { return observation_; }
  /// States visited since the last reset, x_0 .. x_k.
  const Trace& history() const { return history_; }

 private:
  std::shared_ptr<const Plant> plant_;
  stl::FragmentInfo fragment_;
  StlRewardSpec reward_spec_;
  Preprocessor preprocessor_;
  std::optional<ExtendedState> window_;
  std::vector<double> flags_;
  std::vector<double> observation_;
  Trace history_;
};

}  // namespace stlrl
