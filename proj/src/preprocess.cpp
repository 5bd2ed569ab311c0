#include "stlrl/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stlrl {

namespace {

struct SingleState {
  std::span<const double> x;
  std::size_t size() const { return 1; }
  std::span<const double> operator[](std::size_t) const { return x; }
};

void check_eligible(const stl::Formula& sub, std::size_t tau) {
  if (!sub.is_temporal() || sub.k_e + 1 != tau)
    throw std::invalid_argument("sub-formula " + stl::print(sub) +
                                " is not flag-eligible: it must be G/F ending at tau-1 = " +
                                std::to_string(tau - 1));
  if (stl::contains_temporal(sub.children[0]))
    throw std::invalid_argument("sub-formula body must be temporal-free: " + stl::print(sub));
}

bool holds(const stl::Formula& sub, std::span<const double> x) {
  return stl::detail::eval_boolean(SingleState{x}, 0, sub.children[0]);
}

// The only place numerators become reals.
double on_lattice(std::size_t numerator, std::size_t denominator) {
  return static_cast<double>(numerator) / static_cast<double>(denominator) - 0.5;
}

// Numerator n of the flag n/(tau - k_s); 0 encodes the empty case.
std::size_t flag_numerator(const ExtendedState& z, const stl::Formula& sub) {
  const std::size_t tau = z.tau();
  check_eligible(sub, tau);
  const std::size_t denom = tau - sub.k_s;
  if (sub.op == stl::Op::Globally) {
    std::size_t run = 0;
    while (run < denom && holds(sub, z[tau - 1 - run])) ++run;
    return run;
  }
  for (std::size_t l = tau; l-- > sub.k_s;)
    if (holds(sub, z[l])) return l - sub.k_s + 1;
  return 0;
}

}  // namespace

std::optional<double> flag_value(const ExtendedState& z, const stl::Formula& sub) {
  const std::size_t n = flag_numerator(z, sub);
  if (n == 0) return std::nullopt;
  return static_cast<double>(n) / static_cast<double>(z.tau() - sub.k_s);
}

double transform_flag(std::optional<double> f) { return f ? *f - 0.5 : -0.5; }

double incremental_update(double flag, std::span<const double> x_next, const stl::Formula& sub,
                          std::size_t tau) {
  check_eligible(sub, tau);
  const std::size_t denom = tau - sub.k_s;
  const auto n = static_cast<std::size_t>(
      std::clamp<long long>(std::llround((flag + 0.5) * static_cast<double>(denom)), 0,
                            static_cast<long long>(denom)));
  const bool sat = holds(sub, x_next);
  std::size_t next;
  if (sub.op == stl::Op::Globally) {
    next = sat ? std::min(n + 1, denom) : 0;
  } else {
    next = sat ? denom : (n == 0 ? 0 : n - 1);
  }
  return on_lattice(next, denom);
}

std::vector<double> preprocess_state(const ExtendedState& z, std::span<const stl::Formula> subs) {
  const auto x = z.newest();
  std::vector<double> out(x.begin(), x.end());
  for (const auto& sub : subs) out.push_back(on_lattice(flag_numerator(z, sub), z.tau() - sub.k_s));
  return out;
}

Preprocessor::Preprocessor(std::vector<stl::Formula> subs, std::size_t tau, std::size_t state_dim,
                           std::vector<double> offsets, bool enabled)
    : subs_(std::move(subs)),
      tau_(tau),
      state_dim_(state_dim),
      offsets_(std::move(offsets)),
      enabled_(enabled) {
  if (offsets_.empty()) offsets_.assign(state_dim_, 0.0);
  if (offsets_.size() != state_dim_)
    throw std::invalid_argument("Preprocessor: offsets must match the state dimension");
  if (enabled_)
    for (const auto& sub : subs_) check_eligible(sub, tau_);
}

std::size_t Preprocessor::input_dim() const {
  return enabled_ ? state_dim_ + subs_.size() : tau_ * state_dim_;
}

std::vector<double> Preprocessor::initial_flags(const ExtendedState& z) const {
  std::vector<double> flags;
  if (!enabled_) return flags;
  flags.reserve(subs_.size());
  for (const auto& sub : subs_) flags.push_back(on_lattice(flag_numerator(z, sub), tau_ - sub.k_s));
  return flags;
}

void Preprocessor::update_flags(std::vector<double>& flags, std::span<const double> x_next) const {
  if (!enabled_) return;
  for (std::size_t i = 0; i < subs_.size(); ++i)
    flags[i] = incremental_update(flags[i], x_next, subs_[i], tau_);
}

std::vector<double> Preprocessor::input(const ExtendedState& z,
                                        std::span<const double> flags) const {
  std::vector<double> out;
  out.reserve(input_dim());
  auto append = [&](std::span<const double> x) {
    for (std::size_t j = 0; j < state_dim_; ++j) out.push_back(x[j] - offsets_[j]);
  };
  if (enabled_) {
    append(z.newest());
    out.insert(out.end(), flags.begin(), flags.end());
  } else {
    for (std::size_t i = 0; i < z.tau(); ++i) append(z[i]);
  }
  return out;
}

}  // namespace stlrl
