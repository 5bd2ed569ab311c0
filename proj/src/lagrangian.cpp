#include "stlrl/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace stlrl {

ProjectedScalar::ProjectedScalar(double initial, nn::AdamOptions options)
    : value_(initial), adam_(options) {
  if (!(initial >= 0.0) || !std::isfinite(initial))
    throw std::invalid_argument("projected scalar must start finite and non-negative");
}

double ProjectedScalar::descend(double grad) {
  if (!std::isfinite(grad)) throw std::runtime_error("non-finite multiplier gradient");
  value_ = std::max(0.0, value_ + adam_.increment(grad));
  return value_;
}

void ProjectedScalar::save(std::ostream& os) const {
  nn::write_f64(os, value_);
  adam_.save(os);
}

void ProjectedScalar::load(std::istream& is) {
  value_ = nn::read_f64(is);
  adam_.load(is);
}

static double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean of an empty batch");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double kappa_gradient(std::span<const double> q_s, double l_stl) { return mean(q_s) - l_stl; }

double alpha_gradient(std::span<const double> log_probs, double target_entropy) {
  return -mean(log_probs) - target_entropy;
}

double kappa_update(ProjectedScalar& kappa, std::span<const double> q_s, double l_stl) {
  return kappa.descend(kappa_gradient(q_s, l_stl));
}

double alpha_update(ProjectedScalar& alpha, std::span<const double> log_probs,
                    double target_entropy) {
  return alpha.descend(alpha_gradient(log_probs, target_entropy));
}

OuNoise::OuNoise(std::size_t dim, OuParams params) : params_(params), omega_(dim, 0.0) {}

const std::vector<double>& OuNoise::step(std::span<const double> eps) {
  if (eps.size() != omega_.size()) throw std::invalid_argument("OU noise: dimension mismatch");
  for (std::size_t i = 0; i < omega_.size(); ++i) omega_[i] = ou_step(omega_[i], eps[i], params_);
  return omega_;
}

const std::vector<double>& OuNoise::step(Rng& rng) {
  std::vector<double> eps(omega_.size());
  for (auto& e : eps) e = rng.normal();
  return step(eps);
}

void OuNoise::set_state(std::vector<double> omega) {
  if (omega.size() != omega_.size()) throw std::invalid_argument("OU noise: dimension mismatch");
  omega_ = std::move(omega);
}

}  // namespace stlrl
