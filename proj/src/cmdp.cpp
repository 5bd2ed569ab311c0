#include "stlrl/cmdp.hpp"

#include <stdexcept>

namespace stlrl {

TauCmdp::TauCmdp(std::shared_ptr<const Plant> plant, stl::FragmentInfo fragment, double beta,
                 bool preprocess)
    : plant_(std::move(plant)),
      fragment_(std::move(fragment)),
      reward_spec_(reward_spec_for(fragment_, beta)),
      preprocessor_(fragment_.subformulae, fragment_.tau, plant_->state_dim(),
                    plant_->input_offsets(), preprocess),
      history_(plant_->state_dim()) {
  if (preprocess && !fragment_.flag_eligible)
    throw std::invalid_argument(
        "formula is not flag-eligible (sub-formulae must all end at tau-1); "
        "disable preprocessing to train on the flattened window");
}

const std::vector<double>& TauCmdp::reset(Rng& rng) {
  const auto x0 = plant_->reset(rng);
  return reset_to(x0);
}

const std::vector<double>& TauCmdp::reset_to(std::span<const double> x0) {
  window_.emplace(x0, fragment_.tau);
  flags_ = preprocessor_.initial_flags(*window_);
  observation_ = preprocessor_.input(*window_, flags_);
  history_ = Trace(plant_->state_dim());
  history_.push_back(x0);
  return observation_;
}

Transition TauCmdp::step(std::span<const double> action, Rng& rng) {
  if (!window_) throw std::logic_error("TauCmdp::step before reset");
  Transition t;
  const auto x = window_->newest();
  t.reward = plant_->reward(x, action);
  t.stl_reward = stl_reward(*window_, reward_spec_);
  const auto x_next = plant_->step(x, action, rng);
  window_->push(x_next);
  preprocessor_.update_flags(flags_, x_next);
  observation_ = preprocessor_.input(*window_, flags_);
  history_.push_back(x_next);
  t.next_observation = observation_;
  return t;
}

std::vector<double> TauCmdp::initial_observation(std::span<const double> x0) const {
  const ExtendedState z(x0, fragment_.tau);
  return preprocessor_.input(z, preprocessor_.initial_flags(z));
}

}  // namespace stlrl
