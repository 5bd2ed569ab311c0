#include <doctest.h>

#include <cmath>

#include "stlrl/tau_env.hpp"
#include "support.hpp"

using namespace stlrl;

namespace {

Trace to_trace(const ExtendedState& z) { return z.window(); }

double brute_lse_min(const std::vector<double>& v, double beta) {
  long double s = 0.0L;
  for (double y : v) s += std::exp(static_cast<long double>(-beta * y));
  return static_cast<double>(-std::log(s) / beta);
}

}  // namespace

TEST_CASE("initial extended state repeats x0") {
  const std::vector<double> x0{1, 2, 0};
  const auto z = init_extended(x0, 3);
  CHECK(z.tau() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::vector<double>(z[i].begin(), z[i].end()) == x0);
  CHECK(init_extended(x0, 1).tau() == 1);
  CHECK_THROWS_AS(init_extended(x0, 0), std::invalid_argument);
}

TEST_CASE("shift drops the oldest state") {
  auto z = init_extended(std::vector<double>{0.0}, 3);
  z.push(std::vector<double>{1.0});  // [0, 0, 1]
  z.push(std::vector<double>{2.0});  // [0, 1, 2]
  const auto z2 = shift(z, std::vector<double>{3.0});
  CHECK(to_trace(z2) == Trace::scalar({1, 2, 3}));
  CHECK(to_trace(z) == Trace::scalar({0, 1, 2}));
  CHECK(to_trace(shift(init_extended(std::vector<double>{5.0}, 1), std::vector<double>{6.0})) ==
        Trace::scalar({6}));
  CHECK_THROWS_AS(shift(z, std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("repeated shifts reproduce every window of a trace") {
  Rng rng(2);
  const Trace x = support::random_trace(rng, 2, 30);
  const std::size_t tau = 6;
  auto z = init_extended(x[0], tau);
  for (std::size_t k = 1; k < x.size(); ++k) {
    z = shift(z, x[k]);
    if (k + 1 >= tau) CHECK(to_trace(z) == x.slice(k + 1 - tau, tau));
  }
}

TEST_CASE("indicator") {
  CHECK(indicator(0.0) == 1);
  CHECK(indicator(-1e-9) == 0);
  CHECK(indicator(3.7) == 1);
}

TEST_CASE("log-sum-exp examples") {
  const std::vector<double> one{0.37};
  CHECK(lse_min(one, 100.0) == 0.37);
  CHECK(lse_max(one, 100.0) == 0.37);
  const std::vector<double> v{1.0, 2.0};
  const double m = lse_min(v, 100.0);
  CHECK(m <= 1.0);
  CHECK(m >= 1.0 - std::log(2.0) / 100.0);
  const std::vector<double> zeros{0.0, 0.0};
  CHECK(lse_min(zeros, 1.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  CHECK(lse_max(zeros, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(lse_min(std::vector<double>{}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lse_max(v, 0.0), std::invalid_argument);
}

TEST_CASE("log-sum-exp stays inside its sandwich and matches the direct formula") {
  Rng rng(8);
  for (int t = 0; t < 5000; ++t) {
    const std::size_t n = 1 + rng.index(20);
    const double beta = std::exp(rng.uniform(-3, 6));
    std::vector<double> v(n);
    for (auto& y : v) y = rng.uniform(-50, 50);
    const double lo = *std::min_element(v.begin(), v.end());
    const double hi = *std::max_element(v.begin(), v.end());
    const double mn = lse_min(v, beta), mx = lse_max(v, beta);
    REQUIRE(mn <= lo);
    REQUIRE(mn >= lo - std::log(static_cast<double>(n)) / beta);
    REQUIRE(mx >= hi);
    REQUIRE(mx <= hi + std::log(static_cast<double>(n)) / beta);
    if (beta * 50 < 700) REQUIRE(mn == doctest::Approx(brute_lse_min(v, beta)).epsilon(1e-9));
  }
}

TEST_CASE("STL reward values") {
  const auto info = stl::validate_fragment(stl::parse("G[0,10](F[0,2](x0 <= 1))", 1));
  const auto spec = reward_spec_for(info, 100.0);
  const auto sat = init_extended(std::vector<double>{0.0}, 3);
  const auto viol = init_extended(std::vector<double>{2.0}, 3);
  CHECK(stl_reward(sat, spec) == -std::exp(-100.0));
  CHECK(stl_reward(viol, spec) == -1.0);

  const auto finfo = stl::validate_fragment(stl::parse("F[0,10](G[0,2](x0 <= 1))", 1));
  const auto fspec = reward_spec_for(finfo, 100.0);
  CHECK(fspec.normalize);
  CHECK(stl_reward(sat, fspec) == 1.0);
  CHECK(stl_reward(viol, fspec) == std::exp(-100.0));

  CHECK_THROWS_AS(stl_reward(init_extended(std::vector<double>{0.0}, 4), spec), std::invalid_argument);
}

TEST_CASE("STL reward only sees the satisfaction bit") {
  Rng rng(4);
  const auto info = stl::validate_fragment(stl::parse("G[0,10](F[0,3](x0 <= 1) & G[0,3](x1 >= -1))", 2));
  const auto spec = reward_spec_for(info, 100.0);
  for (int t = 0; t < 500; ++t) {
    const Trace w = support::random_trace(rng, 2, info.tau);
    auto z = init_extended(w[0], info.tau);
    for (std::size_t k = 1; k < info.tau; ++k) z.push(w[k]);
    Trace moved = w;
    for (std::size_t k = 0; k < moved.size(); ++k)
      for (std::size_t i = 0; i < 2; ++i) {
        // Nudge each coordinate without crossing its threshold.
        const double th = i == 0 ? 1.0 : -1.0;
        const double v = moved[k][i];
        const double gap = std::abs(v - th);
        if (gap > 1e-6) moved[k][i] = v + (v > th ? 0.5 : -0.5) * gap * rng.uniform(0, 1);
      }
    auto z2 = init_extended(moved[0], info.tau);
    for (std::size_t k = 1; k < info.tau; ++k) z2.push(moved[k]);
    const double rho1 = stl::robustness(z.window(), 0, info.inner);
    const double rho2 = stl::robustness(z2.window(), 0, info.inner);
    REQUIRE(indicator(rho1) == indicator(rho2));
    REQUIRE(stl_reward(z, spec) == stl_reward(z2, spec));
  }
}

TEST_CASE("trajectory robustness is min or max over windows and matches the full recursion") {
  Rng rng(6);
  for (int t = 0; t < 300; ++t) {
    const bool outer_g = rng.uniform(0, 1) < 0.5;
    const std::size_t ke = rng.index(6);
    const std::string text = std::string(outer_g ? "G" : "F") + "[0," + std::to_string(ke) +
                             "](F[0,2](x0 <= 0.5) & G[1,2](x1 >= -1))";
    const auto info = stl::validate_fragment(stl::parse(text, 2));
    const Trace x = support::random_trace(rng, 2, ke + info.tau);
    const auto series = window_robustness_series(x, info);
    REQUIRE(series.size() == ke + 1);
    const double expected = outer_g ? *std::min_element(series.begin(), series.end())
                                    : *std::max_element(series.begin(), series.end());
    REQUIRE(trajectory_robustness(x, info) == expected);
    REQUIRE(trajectory_robustness(x, info) == stl::robustness(x, 0, info.formula));
    const double rho = trajectory_robustness(x, info);
    if (rho != 0.0) REQUIRE((rho >= 0.0) == stl::eval_boolean(x, 0, info.formula));
  }
  const auto info = stl::validate_fragment(stl::parse("G[0,3](F[0,2](x0 <= 1))", 1));
  CHECK_THROWS_AS(trajectory_robustness(Trace::scalar({0, 0}), info), std::invalid_argument);
}

TEST_CASE("folding shift reproduces per-window rewards computed from scratch") {
  Rng rng(10);
  const auto info = stl::validate_fragment(stl::parse("G[0,20](F[0,4](x0 <= 0) & F[0,4](x1 <= 0))", 2));
  const auto spec = reward_spec_for(info, 100.0);
  const Trace x = support::random_trace(rng, 2, 40);
  auto z = init_extended(x[0], info.tau);
  for (std::size_t k = 1; k < x.size(); ++k) {
    z = shift(z, x[k]);
    if (k + 1 < info.tau) continue;
    const Trace w = x.slice(k + 1 - info.tau, info.tau);
    const double rho = stl::robustness(w, 0, info.inner);
    REQUIRE(stl_reward(z, spec) == -std::exp(-100.0 * indicator(rho)));
  }
}
