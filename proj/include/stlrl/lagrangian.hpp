#pragma once

// Lagrange multiplier and entropy temperature (both Adam-driven and kept
// non-negative by projection) and the Ornstein-Uhlenbeck exploration process.

#include <iosfwd>
#include <span>
#include <vector>

#include "stlrl/nn.hpp"
#include "stlrl/rng.hpp"

namespace stlrl {

/// A scalar minimized by Adam and projected onto [0, inf) after each step.
class ProjectedScalar {
 public:
  ProjectedScalar(double initial, nn::AdamOptions options);

  double value() const { return value_; }
  /// One Adam step on the gradient of the loss, then max(value, 0).
  double descend(double grad);

  void save(std::ostream& os) const;
  void load(std::istream& is);
  bool operator==(const ProjectedScalar& o) const { return value_ == o.value_ && adam_ == o.adam_; }

 private:
  double value_;
  nn::ScalarAdam adam_;
};

/// Gradient of E[kappa (Q_s - l_STL)] with respect to kappa.
double kappa_gradient(std::span<const double> q_s, double l_stl);
/// Gradient of E[alpha (-log pi - H0)] with respect to alpha.
double alpha_gradient(std::span<const double> log_probs, double target_entropy);

double kappa_update(ProjectedScalar& kappa, std::span<const double> q_s, double l_stl);
double alpha_update(ProjectedScalar& alpha, std::span<const double> log_probs,
                    double target_entropy);

struct OuParams {
  double p1 = 0.15;  // mean reversion
  double p2 = 0.0;   // long-run mean
  double p3 = 0.3;   // noise scale
};

/// omega - p1 (omega - p2) + p3 eps.
inline double ou_step(double omega, double eps, const OuParams& p) {
  return omega - p.p1 * (omega - p.p2) + p.p3 * eps;
}

class OuNoise {
 public:
  OuNoise(std::size_t dim, OuParams params);

  void reset() { omega_.assign(omega_.size(), 0.0); }
  /// Advances with explicit innovations.
  const std::vector<double>& step(std::span<const double> eps);
  const std::vector<double>& step(Rng& rng);

  const std::vector<double>& state() const { return omega_; }
  void set_state(std::vector<double> omega);
  const OuParams& params() const { return params_; }

 private:
  OuParams params_;
  std::vector<double> omega_;
};

}  // namespace stlrl
