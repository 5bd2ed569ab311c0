#include "stlrl/stl.hpp"

#include <cctype>
#include <charconv>
#include <system_error>

namespace stlrl::stl {

Formula predicate(std::vector<double> coeffs, double bound) {
  Formula f;
  f.op = Op::Pred;
  f.pred = Predicate{std::move(coeffs), bound};
  return f;
}

Formula negation(Formula f) {
  Formula out;
  out.op = Op::Not;
  out.children.push_back(std::move(f));
  return out;
}

static Formula nary(Op op, std::vector<Formula> fs) {
  if (fs.empty()) throw std::invalid_argument("and/or needs at least one operand");
  if (fs.size() == 1) return std::move(fs.front());
  Formula out;
  out.op = op;
  out.children = std::move(fs);
  return out;
}

Formula conjunction(std::vector<Formula> fs) { return nary(Op::And, std::move(fs)); }
Formula disjunction(std::vector<Formula> fs) { return nary(Op::Or, std::move(fs)); }

static Formula temporal(Op op, std::size_t k_s, std::size_t k_e, Formula f) {
  if (k_s > k_e) throw std::invalid_argument("temporal interval requires k_s <= k_e");
  Formula out;
  out.op = op;
  out.k_s = k_s;
  out.k_e = k_e;
  out.children.push_back(std::move(f));
  return out;
}

Formula globally(std::size_t k_s, std::size_t k_e, Formula f) {
  return temporal(Op::Globally, k_s, k_e, std::move(f));
}
Formula eventually(std::size_t k_s, std::size_t k_e, Formula f) {
  return temporal(Op::Finally, k_s, k_e, std::move(f));
}

std::size_t horizon(const Formula& f) {
  switch (f.op) {
    case Op::Pred: return 0;
    case Op::Not: return horizon(f.children[0]);
    case Op::And:
    case Op::Or: {
      std::size_t h = 0;
      for (const auto& c : f.children) h = std::max(h, horizon(c));
      return h;
    }
    case Op::Globally:
    case Op::Finally: return f.k_e + horizon(f.children[0]);
  }
  return 0;
}

bool contains_temporal(const Formula& f) {
  if (f.is_temporal()) return true;
  return std::any_of(f.children.begin(), f.children.end(), contains_temporal);
}

static void require_length(const Trace& trace, std::size_t k, const Formula& f) {
  const std::size_t needed = k + horizon(f) + 1;
  if (trace.size() < needed)
    throw std::invalid_argument("trace too short: formula needs " + std::to_string(needed) +
                                " states from index 0, trace has " +
                                std::to_string(trace.size()));
}

bool eval_boolean(const Trace& trace, std::size_t k, const Formula& f) {
  require_length(trace, k, f);
  return detail::eval_boolean(trace, k, f);
}

double robustness(const Trace& trace, std::size_t k, const Formula& f) {
  require_length(trace, k, f);
  return detail::robustness(trace, k, f);
}

// ---------------------------------------------------------------- printing

namespace {

std::string number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void print_into(const Formula& f, std::string& out) {
  switch (f.op) {
    case Op::Pred: {
      bool first = true;
      for (std::size_t i = 0; i < f.pred.coeffs.size(); ++i) {
        const double c = f.pred.coeffs[i];
        if (c == 0.0) continue;
        if (first) {
          out += number(c);
        } else {
          out += c < 0 ? " - " : " + ";
          out += number(c < 0 ? -c : c);
        }
        out += "*x" + std::to_string(i);
        first = false;
      }
      if (first) out += "0*x0";
      out += " <= " + number(f.pred.bound);
      return;
    }
    case Op::Not:
      out += "!(";
      print_into(f.children[0], out);
      out += ")";
      return;
    case Op::And:
    case Op::Or: {
      const char* sep = f.op == Op::And ? " & " : " | ";
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) out += sep;
        const auto& c = f.children[i];
        const bool wrap = c.op == Op::And || c.op == Op::Or;
        if (wrap) out += "(";
        print_into(c, out);
        if (wrap) out += ")";
      }
      return;
    }
    case Op::Globally:
    case Op::Finally:
      out += f.op == Op::Globally ? "G[" : "F[";
      out += std::to_string(f.k_s) + "," + std::to_string(f.k_e) + "](";
      print_into(f.children[0], out);
      out += ")";
      return;
  }
}

}  // namespace

std::string print(const Formula& f) {
  std::string out;
  print_into(f, out);
  return out;
}

// ----------------------------------------------------------------- parsing

namespace {

struct Linear {
  std::vector<double> coeffs;
  double constant = 0.0;
};

class Parser {
 public:
  Parser(std::string_view text, std::size_t dim) : text_(text), dim_(dim) {}

  Formula parse_all() {
    Formula f = disj();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  std::string_view text_;
  std::size_t dim_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    throw ParseError(what, at);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(std::string_view tok) {
    skip_ws();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  Formula disj() {
    std::vector<Formula> parts{conj()};
    while (accept("|")) parts.push_back(conj());
    return disjunction(std::move(parts));
  }

  Formula conj() {
    std::vector<Formula> parts{unary()};
    while (accept("&")) parts.push_back(unary());
    return conjunction(std::move(parts));
  }

  std::size_t integer() {
    skip_ws();
    std::size_t v = 0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), v);
    if (res.ec != std::errc()) fail("expected a nonnegative integer time bound");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return v;
  }

  Formula unary() {
    const char c = peek();
    if (c == 'G' || c == 'F') {
      const std::size_t at = pos_;
      ++pos_;
      expect("[");
      const std::size_t k_s = integer();
      expect(",");
      const std::size_t k_e = integer();
      expect("]");
      if (k_s > k_e)
        fail_at("malformed interval [" + std::to_string(k_s) + "," + std::to_string(k_e) +
                    "]: start exceeds end",
                at);
      expect("(");
      Formula body = disj();
      expect(")");
      return c == 'G' ? globally(k_s, k_e, std::move(body)) : eventually(k_s, k_e, std::move(body));
    }
    if (c == '!') {
      const std::size_t at = pos_;
      ++pos_;
      Formula body = unary();
      if (contains_temporal(body)) fail_at("negation above a temporal operator", at);
      return negation(std::move(body));
    }
    if (c == '(') {
      ++pos_;
      Formula inner = disj();
      expect(")");
      return inner;
    }
    return comparison();
  }

  // A relational chain `e1 cmp e2 [cmp e3]` over linear expressions.
  Formula comparison() {
    std::vector<Linear> exprs{linear()};
    std::vector<bool> less_eq;
    while (true) {
      if (accept("<=")) {
        less_eq.push_back(true);
      } else if (accept(">=")) {
        less_eq.push_back(false);
      } else {
        break;
      }
      exprs.push_back(linear());
    }
    if (less_eq.empty()) fail("expected '<=' or '>='");
    if (less_eq.size() > 2) fail("comparison chains take at most two operators");
    std::vector<Formula> preds;
    for (std::size_t i = 0; i < less_eq.size(); ++i) {
      const Linear& lo = less_eq[i] ? exprs[i] : exprs[i + 1];
      const Linear& hi = less_eq[i] ? exprs[i + 1] : exprs[i];
      std::vector<double> coeffs(dim_);
      for (std::size_t j = 0; j < dim_; ++j) coeffs[j] = lo.coeffs[j] - hi.coeffs[j];
      preds.push_back(predicate(std::move(coeffs), hi.constant - lo.constant));
    }
    return conjunction(std::move(preds));
  }

  bool number(double& out) {
    skip_ws();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    if (first == last || !(std::isdigit(static_cast<unsigned char>(*first)) || *first == '.'))
      return false;
    auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return true;
  }

  bool variable(std::size_t& index) {
    skip_ws();
    if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_])))
      return false;
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[end])) ||
                                  text_[end] == '_'))
      ++end;
    const std::string_view name = text_.substr(at, end - at);
    bool ok = name.size() >= 2 && name[0] == 'x';
    std::size_t idx = 0;
    if (ok) {
      auto res = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      ok = res.ec == std::errc() && res.ptr == name.data() + name.size();
    }
    if (!ok || idx >= dim_) fail_at("unknown variable '" + std::string(name) + "'", at);
    pos_ = end;
    index = idx;
    return true;
  }

  // term := number ['*'] var | number | var
  void term(Linear& acc, double sign) {
    double value = 1.0;
    const bool has_number = number(value);
    if (has_number) accept("*");
    std::size_t idx = 0;
    if (variable(idx)) {
      acc.coeffs[idx] += sign * value;
    } else if (has_number) {
      acc.constant += sign * value;
    } else {
      fail("expected a number or a variable");
    }
  }

  Linear linear() {
    Linear acc{std::vector<double>(dim_, 0.0), 0.0};
    double sign = 1.0;
    if (accept("-")) sign = -1.0;
    else accept("+");
    term(acc, sign);
    while (true) {
      const char c = peek();
      if (c == '+' || c == '-') {
        ++pos_;
        term(acc, c == '+' ? 1.0 : -1.0);
      } else {
        break;
      }
    }
    return acc;
  }
};

}  // namespace

Formula parse(std::string_view text, std::size_t state_dim) {
  if (state_dim == 0) throw std::invalid_argument("parse: state dimension must be positive");
  return Parser(text, state_dim).parse_all();
}

// ------------------------------------------------------------ the fragment

namespace {

void collect_subformulae(const Formula& node, std::vector<Formula>& out) {
  switch (node.op) {
    case Op::And:
    case Op::Or:
      for (const auto& c : node.children) collect_subformulae(c, out);
      return;
    case Op::Globally:
    case Op::Finally:
      if (contains_temporal(node.children[0]))
        throw FragmentError("temporal nesting deeper than two levels", print(node));
      out.push_back(node);
      return;
    case Op::Pred:
    case Op::Not:
      throw FragmentError("expected a G or F sub-formula under the outer operator", print(node));
  }
}

}  // namespace

FragmentInfo validate_fragment(const Formula& f) {
  if (!f.is_temporal())
    throw FragmentError("outer operator must be G[0,K] or F[0,K]", print(f));
  if (f.k_s != 0) throw FragmentError("outer interval must start at 0", print(f));

  FragmentInfo info;
  info.formula = f;
  info.outer = f.op == Op::Globally ? Outer::Globally : Outer::Finally;
  info.k_end = f.k_e;
  info.inner = f.children[0];
  collect_subformulae(info.inner, info.subformulae);
  info.tau = horizon(info.inner) + 1;
  info.flag_eligible =
      std::all_of(info.subformulae.begin(), info.subformulae.end(),
                  [&](const Formula& s) { return s.k_e + 1 == info.tau; });
  return info;
}

}  // namespace stlrl::stl
