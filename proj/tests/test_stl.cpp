#include <doctest.h>

#include "stlrl/stl.hpp"
#include "support.hpp"

using namespace stlrl;
using stl::Formula;

namespace {

const char* kPhi1 =
    "G[0,900](F[0,99](3.5 <= x0 <= 4.5 & 3.5 <= x1 <= 4.5) & "
    "F[0,99](3.5 <= x0 <= 4.5 & 1.5 <= x1 <= 2.5))";
const char* kPhi2 =
    "F[0,450](G[0,49](3.5 <= x0 <= 4.5 & 3.5 <= x1 <= 4.5) | "
    "G[0,49](3.5 <= x0 <= 4.5 & 1.5 <= x1 <= 2.5))";

// Counts the largest index read through operator[].
struct CountingSignal {
  const Trace* trace;
  mutable std::size_t max_read = 0;
  std::size_t size() const { return trace->size(); }
  std::span<const double> operator[](std::size_t k) const {
    max_read = std::max(max_read, k);
    return (*trace)[k];
  }
};

}  // namespace

TEST_CASE("parse maps the concrete syntax onto the tree") {
  const Formula f = stl::parse("F[0,3](x0 >= -2.5 & x0 <= 0)", 1);
  const Formula expected =
      stl::eventually(0, 3, stl::conjunction({stl::predicate({-1.0}, 2.5), stl::predicate({1.0}, 0.0)}));
  CHECK(f == expected);
}

TEST_CASE("parse accepts the benchmark formulas") {
  const Formula f = stl::parse(kPhi1, 3);
  REQUIRE(f.op == stl::Op::Globally);
  CHECK(f.k_s == 0);
  CHECK(f.k_e == 900);
  REQUIRE(f.children[0].op == stl::Op::And);
  REQUIRE(f.children[0].children.size() == 2);
  for (const auto& sub : f.children[0].children) {
    CHECK(sub.op == stl::Op::Finally);
    CHECK(sub.k_e == 99);
  }
  CHECK(stl::parse(kPhi2, 3).op == stl::Op::Finally);
}

TEST_CASE("double-sided comparisons become a conjunction") {
  const Formula f = stl::parse("3.5 <= x0 <= 4.5", 3);
  CHECK(f == stl::conjunction({stl::predicate({-1, 0, 0}, -3.5), stl::predicate({1, 0, 0}, 4.5)}));
}

TEST_CASE("linear expressions with several terms and constants") {
  const Formula f = stl::parse("2*x0 - x1 + 1 <= 0.5 + x1", 2);
  CHECK(f == stl::predicate({2.0, -2.0}, -0.5));
  CHECK(stl::parse("x1 >= 2 x0", 2) == stl::predicate({2.0, -1.0}, 0.0));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(stl::parse("G[3,1](x0 <= 1)", 1), stl::ParseError);
  CHECK_THROWS_WITH_AS(stl::parse("G[3,1](x0 <= 1)", 1), doctest::Contains("malformed interval"),
                       stl::ParseError);
  CHECK_THROWS_WITH_AS(stl::parse("x3 <= 1", 2), doctest::Contains("unknown variable"), stl::ParseError);
  CHECK_THROWS_WITH_AS(stl::parse("!F[0,2](x0 <= 1)", 1), doctest::Contains("negation above a temporal"),
                       stl::ParseError);
  CHECK_THROWS_AS(stl::parse("x0 <=", 1), stl::ParseError);
  CHECK_THROWS_AS(stl::parse("G[0,1](x0 <= 1", 1), stl::ParseError);
  CHECK_THROWS_AS(stl::parse("x0 <= 1 extra", 1), stl::ParseError);
  try {
    stl::parse("x0 <= 1 $", 1);
    FAIL("expected a parse error");
  } catch (const stl::ParseError& e) {
    CHECK(e.position() == 8);
  }
}

TEST_CASE("negation inside a temporal operator is allowed") {
  const Formula f = stl::parse("G[0,2](!(x0 <= 1))", 1);
  CHECK(f.children[0].op == stl::Op::Not);
}

TEST_CASE("horizon recursion") {
  CHECK(stl::horizon(stl::parse("x0 <= 1", 1)) == 0);
  const Formula phi1 = stl::parse(kPhi1, 3);
  CHECK(stl::horizon(phi1.children[0]) == 99);
  CHECK(stl::horizon(phi1) == 999);
  CHECK(stl::horizon(stl::parse(kPhi2, 3)) == 499);
  CHECK(stl::horizon(stl::parse("G[2,5](F[1,3](x0 <= 1)) | x0 <= 2", 1)) == 8);
}

TEST_CASE("Boolean semantics on small traces") {
  CHECK(stl::eval_boolean(Trace::scalar({1.5}), 0, stl::parse("x0 <= 2.5", 1)));
  CHECK(stl::eval_boolean(Trace::scalar({-0.5, 0.5, 1.0, 1.5}), 0, stl::parse("F[0,3](-2.5 <= x0 <= 0)", 1)));
  CHECK_FALSE(stl::eval_boolean(Trace::scalar({0.5, 1.0, 1.5, 2.0}), 0, stl::parse("G[0,3](x0 <= 1.0)", 1)));
}

TEST_CASE("robustness on small traces") {
  CHECK(stl::robustness(Trace::scalar({1.5}), 0, stl::parse("x0 <= 2.5", 1)) == 1.0);
  CHECK(stl::robustness(Trace::scalar({-0.5, 0.5, 1.0, 1.5}), 0,
                        stl::parse("F[0,3](x0 >= -2.5 & x0 <= 0)", 1)) == 0.5);
  const Trace x = Trace::scalar({0.3});
  const Formula psi = stl::predicate({1.0}, 1.0);
  CHECK(stl::robustness(x, 0, psi) == doctest::Approx(0.7));
  CHECK(stl::robustness(x, 0, stl::negation(psi)) == -stl::robustness(x, 0, psi));
}

TEST_CASE("evaluation rejects traces shorter than the horizon") {
  const Formula f = stl::parse("G[0,3](x0 <= 1)", 1);
  CHECK_THROWS_AS(stl::robustness(Trace::scalar({0, 0, 0}), 0, f), std::invalid_argument);
  CHECK_THROWS_AS(stl::eval_boolean(Trace::scalar({0, 0, 0, 0}), 1, f), std::invalid_argument);
  CHECK_NOTHROW(stl::eval_boolean(Trace::scalar({0, 0, 0, 0}), 0, f));
}

TEST_CASE("robustness equals window enumeration and its sign matches the Boolean semantics") {
  Rng rng(11);
  int nonzero = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const Formula f = support::random_formula(rng, 2, 5);
    const std::size_t hrz = stl::horizon(f);
    const std::size_t len = hrz + 1 + rng.index(12 - std::min<std::size_t>(hrz, 11));
    const Trace x = support::random_trace(rng, 2, std::max(len, hrz + 1));
    const auto oracle = support::robustness_signal(x, f);
    const auto sat = support::satisfaction_signal(x, f);
    REQUIRE(oracle.size() == x.size() - hrz);
    for (std::size_t k = 0; k < oracle.size(); ++k) {
      const double rho = stl::robustness(x, k, f);
      REQUIRE(rho == oracle[k]);
      const bool b = stl::eval_boolean(x, k, f);
      REQUIRE(b == sat[k]);
      if (rho != 0.0) {
        ++nonzero;
        REQUIRE((rho > 0.0) == b);
      }
    }
  }
  CHECK(nonzero > 1000);
}

TEST_CASE("horizon is the furthest index the Boolean semantics can read") {
  Rng rng(5);
  std::size_t attained = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Formula f = support::random_formula(rng, 2, 4);
    const std::size_t hrz = stl::horizon(f);
    const Trace x = support::random_trace(rng, 2, hrz + 3);
    std::size_t worst = 0;
    for (std::size_t k = 0; k + hrz < x.size(); ++k) {
      CountingSignal sig{&x};
      (void)stl::detail::eval_boolean(sig, k, f);
      (void)stl::detail::robustness(sig, k, f);
      REQUIRE(sig.max_read <= k + hrz);
      worst = std::max(worst, sig.max_read - k);
    }
    if (worst == hrz) ++attained;
  }
  // Robustness visits every index of every window, so the bound is tight.
  CHECK(attained == 500);
}

TEST_CASE("print and parse round-trip") {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const Formula f = support::random_formula(rng, 3, 6);
    const std::string text = stl::print(f);
    INFO(text);
    REQUIRE(stl::parse(text, 3) == f);
  }
  const Formula phi1 = stl::parse(kPhi1, 3);
  CHECK(stl::parse(stl::print(phi1), 3) == phi1);
}

TEST_CASE("fragment of the benchmark formulas") {
  const auto i1 = stl::validate_fragment(stl::parse(kPhi1, 3));
  CHECK(i1.outer == stl::Outer::Globally);
  CHECK(i1.k_end == 900);
  CHECK(i1.subformulae.size() == 2);
  CHECK(i1.tau == 100);
  CHECK(i1.flag_eligible);

  const auto i2 = stl::validate_fragment(stl::parse(kPhi2, 3));
  CHECK(i2.outer == stl::Outer::Finally);
  CHECK(i2.k_end == 450);
  CHECK(i2.subformulae.size() == 2);
  CHECK(i2.tau == 50);
  CHECK(i2.flag_eligible);
}

TEST_CASE("flag eligibility needs every sub-formula to end at tau - 1") {
  const auto info = stl::validate_fragment(stl::parse("F[0,5](G[0,2](x0 <= 1) & F[1,3](x0 >= 0))", 1));
  CHECK(info.tau == 4);
  CHECK_FALSE(info.flag_eligible);
  CHECK(stl::validate_fragment(stl::parse("F[0,5](G[1,3](x0 <= 1) & F[0,3](x0 >= 0))", 1)).flag_eligible);
}

TEST_CASE("fragment violations name the offending node") {
  CHECK_THROWS_WITH_AS(stl::validate_fragment(stl::parse("G[1,5](F[0,2](x0 <= 1))", 1)),
                       doctest::Contains("G[1,5]"), stl::FragmentError);
  CHECK_THROWS_AS(stl::validate_fragment(stl::parse("x0 <= 1", 1)), stl::FragmentError);
  CHECK_THROWS_WITH_AS(stl::validate_fragment(stl::parse("G[0,5](F[0,2](G[0,1](x0 <= 1)))", 1)),
                       doctest::Contains("F[0,2](G[0,1]"), stl::FragmentError);
  CHECK_THROWS_AS(stl::validate_fragment(stl::parse("G[0,5](x0 <= 1 & F[0,2](x0 <= 0))", 1)),
                  stl::FragmentError);
}

TEST_CASE("sub-formulae are the temporal leaves in order") {
  const auto info = stl::validate_fragment(
      stl::parse("G[0,3]((F[0,2](x0 <= 1) | G[0,2](x0 >= 0)) & F[1,2](x0 <= 3))", 1));
  REQUIRE(info.subformulae.size() == 3);
  CHECK(info.subformulae[0].op == stl::Op::Finally);
  CHECK(info.subformulae[1].op == stl::Op::Globally);
  CHECK(info.subformulae[2].k_s == 1);
  CHECK(info.tau == 3);
}
