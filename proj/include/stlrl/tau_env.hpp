#pragma once

// The tau-extended state (a sliding window over the last tau plant states)
// and the STL reward that turns window robustness into a per-step signal.

#include <cstddef>
#include <span>
#include <vector>

#include "stlrl/stl.hpp"
#include "stlrl/trace.hpp"

namespace stlrl {

/// Window z[0..tau-1] of plant states; z[tau-1] is the newest.
class ExtendedState {
 public:
  ExtendedState(std::span<const double> x0, std::size_t tau);

  std::size_t tau() const { return window_.size(); }
  std::size_t dim() const { return window_.dim(); }
  std::span<const double> operator[](std::size_t i) const { return window_[i]; }
  std::span<const double> newest() const { return window_[window_.size() - 1]; }
  const Trace& window() const { return window_; }

  /// In-place transition: drops z[0], appends `x_next`.
  void push(std::span<const double> x_next);

  bool operator==(const ExtendedState&) const = default;

 private:
  Trace window_;
};

ExtendedState init_extended(std::span<const double> x0, std::size_t tau);

/// z'[i] = z[i+1] for i < tau-1, z'[tau-1] = x_next.
ExtendedState shift(const ExtendedState& z, std::span<const double> x_next);

/// 1 if y >= 0 else 0.
inline int indicator(double y) { return y >= 0.0 ? 1 : 0; }

/// Soft minimum -(1/beta) log sum exp(-beta y_i), evaluated in shifted form.
double lse_min(std::span<const double> values, double beta);
/// Soft maximum (1/beta) log sum exp(beta y_i).
double lse_max(std::span<const double> values, double beta);

struct StlRewardSpec {
  stl::Formula inner;  // phi, evaluated on the window
  stl::Outer outer = stl::Outer::Globally;
  double beta = 100.0;
  bool normalize = true;  // F-type only: divide by exp(beta)
};

StlRewardSpec reward_spec_for(const stl::FragmentInfo& info, double beta);

/// Per-step STL reward of a window:
///   G: -exp(-beta 1(rho)),  F: exp(beta 1(rho)) or exp(beta (1(rho) - 1)) when normalized.
double stl_reward(const ExtendedState& z, const StlRewardSpec& spec);

/// rho(z_k, phi) for every complete window z_k, k = tau-1 .. trace.size()-1.
std::vector<double> window_robustness_series(const Trace& trace, const stl::FragmentInfo& info);

/// Robustness of the whole trace: min (outer G) or max (outer F) over the
/// window series.
double trajectory_robustness(const Trace& trace, const stl::FragmentInfo& info);

}  // namespace stlrl
