#pragma once

// Flag-state pre-processing: summarizes a tau-window by one normalized timer
// per temporal sub-formula so the networks see n_x + M inputs instead of
// tau * n_x.
//
// Flag values are multiples of 1/(tau - k_s). Both the from-scratch and the
// incremental route compute on the integer numerator and convert with the
// same expression, so the two agree bit for bit.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stlrl/stl.hpp"
#include "stlrl/tau_env.hpp"

namespace stlrl {

/// Raw flag f^i in (0, 1]; nullopt stands for max(empty set) = -infinity.
std::optional<double> flag_value(const ExtendedState& z, const stl::Formula& sub);

/// f - 1/2, or -1/2 for the empty case.
double transform_flag(std::optional<double> f);

/// One-step flag update from the transformed value and the newest state.
double incremental_update(double flag, std::span<const double> x_next, const stl::Formula& sub,
                          std::size_t tau);

/// [z[tau-1], f^1 .. f^M] with the transformed flags.
std::vector<double> preprocess_state(const ExtendedState& z, std::span<const stl::Formula> subs);

/// Maps extended states to network inputs, either through flags or, when
/// disabled, by flattening the whole window. State offsets are subtracted
/// componentwise before the state enters the network input.
class Preprocessor {
 public:
  Preprocessor(std::vector<stl::Formula> subs, std::size_t tau, std::size_t state_dim,
               std::vector<double> offsets, bool enabled);

  std::size_t input_dim() const;
  std::size_t tau() const { return tau_; }
  bool enabled() const { return enabled_; }
  const std::vector<stl::Formula>& subformulae() const { return subs_; }

  /// Transformed flags of a window, computed from scratch.
  std::vector<double> initial_flags(const ExtendedState& z) const;
  /// Advances flags by the state just appended to the window.
  void update_flags(std::vector<double>& flags, std::span<const double> x_next) const;
  /// Network input for a window whose flags are `flags`.
  std::vector<double> input(const ExtendedState& z, std::span<const double> flags) const;

 private:
  std::vector<stl::Formula> subs_;
  std::size_t tau_;
  std::size_t state_dim_;
  std::vector<double> offsets_;
  bool enabled_;
};

}  // namespace stlrl
