#pragma once

// Signal temporal logic over discrete-time traces: syntax tree, parser,
// Boolean and quantitative semantics, horizon, and the restricted
// G/F-over-sub-formulae fragment the constrained learner works with.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stlrl/trace.hpp"

namespace stlrl::stl {

/// Linear predicate `coeffs . x <= bound`.
struct Predicate {
  std::vector<double> coeffs;
  double bound = 0.0;

  double lhs(std::span<const double> x) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) acc += coeffs[i] * x[i];
    return acc;
  }
  bool operator==(const Predicate&) const = default;
};

enum class Op { Pred, Not, And, Or, Globally, Finally };

/// STL syntax tree. Temporal bounds are integer step counts.
struct Formula {
  Op op = Op::Pred;
  Predicate pred;                 // Op::Pred only
  std::size_t k_s = 0, k_e = 0;   // Op::Globally / Op::Finally only
  std::vector<Formula> children;  // one for Not/G/F, two or more for And/Or

  bool is_temporal() const { return op == Op::Globally || op == Op::Finally; }
  bool operator==(const Formula&) const = default;
};

Formula predicate(std::vector<double> coeffs, double bound);
Formula negation(Formula f);
Formula conjunction(std::vector<Formula> fs);
Formula disjunction(std::vector<Formula> fs);
Formula globally(std::size_t k_s, std::size_t k_e, Formula f);
Formula eventually(std::size_t k_s, std::size_t k_e, Formula f);

/// Syntax error carrying the byte offset into the source text.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Formula outside the G/F fragment; `node` is the printed offending node.
class FragmentError : public std::runtime_error {
 public:
  FragmentError(const std::string& what, std::string node)
      : std::runtime_error(what + ": " + node), node_(std::move(node)) {}
  const std::string& node() const { return node_; }

 private:
  std::string node_;
};

/// Parses the textual syntax (see docs/formula_syntax.md) over variables
/// `x0 .. x{state_dim-1}`.
Formula parse(std::string_view text, std::size_t state_dim);

/// Canonical text; `parse(print(f), n) == f` for every f over n variables.
std::string print(const Formula& f);

std::size_t horizon(const Formula& f);

bool contains_temporal(const Formula& f);

// Evaluation is written against any signal type exposing `size()` and
// `operator[](k) -> std::span<const double>`, which lets tests observe reads.
namespace detail {

template <class Signal>
bool eval_boolean(const Signal& x, std::size_t k, const Formula& f) {
  switch (f.op) {
    case Op::Pred: return f.pred.lhs(x[k]) <= f.pred.bound;
    case Op::Not: return !eval_boolean(x, k, f.children[0]);
    case Op::And:
      return std::all_of(f.children.begin(), f.children.end(),
                         [&](const Formula& c) { return eval_boolean(x, k, c); });
    case Op::Or:
      return std::any_of(f.children.begin(), f.children.end(),
                         [&](const Formula& c) { return eval_boolean(x, k, c); });
    case Op::Globally:
      for (std::size_t j = k + f.k_s; j <= k + f.k_e; ++j)
        if (!eval_boolean(x, j, f.children[0])) return false;
      return true;
    case Op::Finally:
      for (std::size_t j = k + f.k_s; j <= k + f.k_e; ++j)
        if (eval_boolean(x, j, f.children[0])) return true;
      return false;
  }
  return false;
}

template <class Signal>
double robustness(const Signal& x, std::size_t k, const Formula& f) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (f.op) {
    case Op::Pred: return f.pred.bound - f.pred.lhs(x[k]);
    case Op::Not: return -robustness(x, k, f.children[0]);
    case Op::And: {
      double r = inf;
      for (const auto& c : f.children) r = std::min(r, robustness(x, k, c));
      return r;
    }
    case Op::Or: {
      double r = -inf;
      for (const auto& c : f.children) r = std::max(r, robustness(x, k, c));
      return r;
    }
    case Op::Globally: {
      double r = inf;
      for (std::size_t j = k + f.k_s; j <= k + f.k_e; ++j)
        r = std::min(r, robustness(x, j, f.children[0]));
      return r;
    }
    case Op::Finally: {
      double r = -inf;
      for (std::size_t j = k + f.k_s; j <= k + f.k_e; ++j)
        r = std::max(r, robustness(x, j, f.children[0]));
      return r;
    }
  }
  return 0.0;
}

}  // namespace detail

/// `x_{k:} |= f`. Requires `k + horizon(f) < trace.size()`.
bool eval_boolean(const Trace& trace, std::size_t k, const Formula& f);

/// Quantitative robustness of `x_{k:}` against `f`; same precondition.
double robustness(const Trace& trace, std::size_t k, const Formula& f);

enum class Outer { Globally, Finally };

/// The shape `G[0,K_e](phi)` or `F[0,K_e](phi)` where `phi` is an and/or
/// combination of temporal sub-formulae over temporal-free bodies.
struct FragmentInfo {
  Formula formula;   // the whole outer formula
  Outer outer = Outer::Globally;
  std::size_t k_end = 0;  // K_e
  Formula inner;          // phi
  std::vector<Formula> subformulae;  // the temporal leaves of phi, left to right
  std::size_t tau = 1;               // horizon(phi) + 1
  bool flag_eligible = false;        // every sub-formula ends at tau - 1
};

FragmentInfo validate_fragment(const Formula& f);

}  // namespace stlrl::stl
