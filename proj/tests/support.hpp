#pragma once

// Random formula/trace generators and an independent dynamic-programming
// robustness oracle shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <vector>

#include "stlrl/rng.hpp"
#include "stlrl/stl.hpp"
#include "stlrl/trace.hpp"

namespace support {

using stlrl::Rng;
using stlrl::Trace;
namespace stl = stlrl::stl;

inline double quarter(Rng& rng, double lo, double hi) {
  return std::round(rng.uniform(lo, hi) * 4.0) / 4.0;
}

inline stl::Formula random_predicate(Rng& rng, std::size_t dim) {
  std::vector<double> c(dim, 0.0);
  c[rng.index(dim)] = rng.uniform(0, 1) < 0.5 ? 1.0 : -1.0;
  if (dim > 1 && rng.uniform(0, 1) < 0.3) c[rng.index(dim)] += quarter(rng, -1, 1);
  return stl::predicate(c, quarter(rng, -2, 2));
}

/// Temporal-free formula: predicates under negation, and, or.
inline stl::Formula random_body(Rng& rng, std::size_t dim, int depth = 2) {
  const double u = rng.uniform(0, 1);
  if (depth == 0 || u < 0.4) return random_predicate(rng, dim);
  if (u < 0.55) return stl::negation(random_body(rng, dim, depth - 1));
  std::vector<stl::Formula> kids{random_body(rng, dim, depth - 1), random_body(rng, dim, depth - 1)};
  return u < 0.8 ? stl::conjunction(kids) : stl::disjunction(kids);
}

inline stl::Formula random_temporal(Rng& rng, std::size_t max_end, stl::Formula body) {
  const std::size_t e = rng.index(max_end + 1);
  const std::size_t s = rng.index(e + 1);
  return rng.uniform(0, 1) < 0.5 ? stl::globally(s, e, std::move(body))
                                 : stl::eventually(s, e, std::move(body));
}

/// Formula of temporal depth <= 2 whose horizon is at most 2 * max_end.
inline stl::Formula random_formula(Rng& rng, std::size_t dim, std::size_t max_end) {
  auto leaf = [&] {
    const double u = rng.uniform(0, 1);
    if (u < 0.25) return random_body(rng, dim, 1);
    return random_temporal(rng, max_end, random_body(rng, dim, 1));
  };
  auto inner = [&] {
    const double u = rng.uniform(0, 1);
    if (u < 0.4) return leaf();
    std::vector<stl::Formula> kids{leaf(), leaf()};
    return u < 0.7 ? stl::conjunction(kids) : stl::disjunction(kids);
  };
  const double u = rng.uniform(0, 1);
  if (u < 0.7) return random_temporal(rng, max_end, inner());
  std::vector<stl::Formula> kids{inner(), inner()};
  return u < 0.85 ? stl::conjunction(kids) : stl::disjunction(kids);
}

inline Trace random_trace(Rng& rng, std::size_t dim, std::size_t length) {
  Trace t(dim);
  std::vector<double> x(dim);
  for (std::size_t k = 0; k < length; ++k) {
    for (auto& v : x) v = quarter(rng, -3, 3) + rng.uniform(-0.1, 0.1);
    t.push_back(x);
  }
  return t;
}

/// Robustness signal of f at every index where it is defined, computed
/// bottom-up over whole signals with explicit window enumeration.
inline std::vector<double> robustness_signal(const Trace& x, const stl::Formula& f) {
  const std::size_t n = x.size();
  switch (f.op) {
    case stl::Op::Pred: {
      std::vector<double> r(n);
      for (std::size_t t = 0; t < n; ++t) {
        double h = 0.0;
        for (std::size_t i = 0; i < x.dim(); ++i) h += f.pred.coeffs[i] * x[t][i];
        r[t] = f.pred.bound - h;
      }
      return r;
    }
    case stl::Op::Not: {
      auto r = robustness_signal(x, f.children[0]);
      for (auto& v : r) v = -v;
      return r;
    }
    case stl::Op::And:
    case stl::Op::Or: {
      std::vector<std::vector<double>> kids;
      std::size_t len = n;
      for (const auto& c : f.children) {
        kids.push_back(robustness_signal(x, c));
        len = std::min(len, kids.back().size());
      }
      std::vector<double> r(len);
      for (std::size_t t = 0; t < len; ++t) {
        std::vector<double> vals;
        for (const auto& k : kids) vals.push_back(k[t]);
        r[t] = f.op == stl::Op::And ? *std::min_element(vals.begin(), vals.end())
                                    : *std::max_element(vals.begin(), vals.end());
      }
      return r;
    }
    case stl::Op::Globally:
    case stl::Op::Finally: {
      const auto child = robustness_signal(x, f.children[0]);
      if (child.size() <= f.k_e) return {};
      std::vector<double> r(child.size() - f.k_e);
      for (std::size_t t = 0; t < r.size(); ++t) {
        std::vector<double> window(child.begin() + static_cast<std::ptrdiff_t>(t + f.k_s),
                                   child.begin() + static_cast<std::ptrdiff_t>(t + f.k_e + 1));
        r[t] = f.op == stl::Op::Globally ? *std::min_element(window.begin(), window.end())
                                         : *std::max_element(window.begin(), window.end());
      }
      return r;
    }
  }
  return {};
}

/// Boolean satisfaction signal by the same enumeration.
inline std::vector<bool> satisfaction_signal(const Trace& x, const stl::Formula& f) {
  const std::size_t n = x.size();
  switch (f.op) {
    case stl::Op::Pred: {
      std::vector<bool> r(n);
      for (std::size_t t = 0; t < n; ++t) {
        double h = 0.0;
        for (std::size_t i = 0; i < x.dim(); ++i) h += f.pred.coeffs[i] * x[t][i];
        r[t] = h <= f.pred.bound;
      }
      return r;
    }
    case stl::Op::Not: {
      auto r = satisfaction_signal(x, f.children[0]);
      r.flip();
      return r;
    }
    case stl::Op::And:
    case stl::Op::Or: {
      std::vector<std::vector<bool>> kids;
      std::size_t len = n;
      for (const auto& c : f.children) {
        kids.push_back(satisfaction_signal(x, c));
        len = std::min(len, kids.back().size());
      }
      std::vector<bool> r(len, f.op == stl::Op::And);
      for (std::size_t t = 0; t < len; ++t)
        for (const auto& k : kids) r[t] = f.op == stl::Op::And ? (r[t] && k[t]) : (r[t] || k[t]);
      return r;
    }
    case stl::Op::Globally:
    case stl::Op::Finally: {
      const auto child = satisfaction_signal(x, f.children[0]);
      if (child.size() <= f.k_e) return {};
      std::vector<bool> r(child.size() - f.k_e);
      for (std::size_t t = 0; t < r.size(); ++t) {
        bool all = true, any = false;
        for (std::size_t j = t + f.k_s; j <= t + f.k_e; ++j) {
          all = all && child[j];
          any = any || child[j];
        }
        r[t] = f.op == stl::Op::Globally ? all : any;
      }
      return r;
    }
  }
  return {};
}

}  // namespace support
