#include "ordlab/ordinal.hpp"

#include <cctype>
#include <sstream>

#include "ordlab/error.hpp"

namespace ordlab {

struct Ordinal::Rep {
  std::vector<Term> terms;
  std::size_t hash = 0;
};

namespace {

const std::vector<Term>& empty_terms() {
  static const std::vector<Term> empty;
  return empty;
}

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

void check_natural(Natural n, const char* what) {
  if (n > ordinal_limits().max_natural) {
    throw GuardError(std::string(what) + " " + std::to_string(n) + " exceeds the natural-number guard " +
                     std::to_string(ordinal_limits().max_natural));
  }
}

Natural checked_add(Natural a, Natural b) {
  const Natural limit = ordinal_limits().max_natural;
  if (a > limit || b > limit - a) {
    throw GuardError("coefficient overflow: " + std::to_string(a) + " + " + std::to_string(b));
  }
  return a + b;
}

}  // namespace

OrdinalLimits& ordinal_limits() {
  static OrdinalLimits limits;
  return limits;
}

Ordinal Ordinal::make_unchecked(std::vector<Term> terms) {
  if (terms.empty()) return Ordinal{};
  std::size_t h = terms.size();
  for (const auto& t : terms) {
    h = mix(h, t.exponent.hash());
    h = mix(h, std::hash<Natural>{}(t.coefficient));
  }
  auto rep = std::make_shared<Rep>();
  rep->terms = std::move(terms);
  rep->hash = h;
  return Ordinal(std::move(rep));
}

Ordinal Ordinal::from_terms(std::vector<Term> terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].coefficient == 0) throw DomainError("coefficient 0 in Cantor normal form");
    check_natural(terms[i].coefficient, "coefficient");
    if (i > 0 && !(terms[i].exponent < terms[i - 1].exponent)) {
      throw DomainError("exponents must be strictly decreasing");
    }
  }
  return make_unchecked(std::move(terms));
}

Ordinal Ordinal::finite(Natural n) {
  if (n == 0) return Ordinal{};
  check_natural(n, "natural");
  return make_unchecked({Term{Ordinal{}, n}});
}

Ordinal Ordinal::omega() {
  static const Ordinal w = make_unchecked({Term{finite(1), 1}});
  return w;
}

Ordinal Ordinal::omega_power(const Ordinal& exponent, Natural coefficient) {
  if (coefficient == 0) return Ordinal{};
  check_natural(coefficient, "coefficient");
  return make_unchecked({Term{exponent, coefficient}});
}

const std::vector<Term>& Ordinal::terms() const { return rep_ ? rep_->terms : empty_terms(); }

std::size_t Ordinal::hash() const noexcept { return rep_ ? rep_->hash : 0; }

bool Ordinal::is_finite() const noexcept {
  return !rep_ || (rep_->terms.size() == 1 && rep_->terms[0].exponent.is_zero());
}

bool Ordinal::is_successor() const noexcept { return rep_ && rep_->terms.back().exponent.is_zero(); }

bool Ordinal::is_limit() const noexcept { return rep_ && !rep_->terms.back().exponent.is_zero(); }

Natural Ordinal::to_natural() const {
  if (!is_finite()) throw DomainError("ordinal " + to_string(*this) + " is not finite");
  return rep_ ? rep_->terms[0].coefficient : 0;
}

Natural Ordinal::finite_part() const noexcept { return is_successor() ? rep_->terms.back().coefficient : 0; }

Ordinal Ordinal::without_finite_part() const {
  if (!is_successor()) return *this;
  std::vector<Term> t(rep_->terms.begin(), rep_->terms.end() - 1);
  return make_unchecked(std::move(t));
}

Ordinal Ordinal::leading_exponent() const { return rep_ ? rep_->terms.front().exponent : Ordinal{}; }

bool operator==(const Ordinal& a, const Ordinal& b) noexcept {
  if (a.rep_ == b.rep_) return true;
  if (!a.rep_ || !b.rep_ || a.rep_->hash != b.rep_->hash) return false;
  return a.rep_->terms == b.rep_->terms;
}

Cmp cmp(const Ordinal& a, const Ordinal& b) noexcept {
  if (a == b) return Cmp::eq;
  const auto& x = a.terms();
  const auto& y = b.terms();
  const std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Cmp e = cmp(x[i].exponent, y[i].exponent);
    if (e != Cmp::eq) return e;
    if (x[i].coefficient != y[i].coefficient) return x[i].coefficient < y[i].coefficient ? Cmp::lt : Cmp::gt;
  }
  if (x.size() == y.size()) return Cmp::eq;
  return x.size() < y.size() ? Cmp::lt : Cmp::gt;
}

std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) noexcept {
  switch (cmp(a, b)) {
    case Cmp::lt:
      return std::strong_ordering::less;
    case Cmp::gt:
      return std::strong_ordering::greater;
    default:
      return std::strong_ordering::equal;
  }
}

// ---------------------------------------------------------------------------
// Arithmetic

Ordinal add(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  if (a.is_zero()) return b;
  const auto& bt = b.terms();
  const Ordinal& lead = bt.front().exponent;
  std::vector<Term> out;
  for (const auto& t : a.terms()) {
    const Cmp c = cmp(t.exponent, lead);
    if (c == Cmp::gt) {
      out.push_back(t);
    } else {
      if (c == Cmp::eq) {
        out.push_back(Term{lead, checked_add(t.coefficient, bt.front().coefficient)});
        out.insert(out.end(), bt.begin() + 1, bt.end());
        return Ordinal::from_terms(std::move(out));
      }
      break;
    }
  }
  out.insert(out.end(), bt.begin(), bt.end());
  return Ordinal::from_terms(std::move(out));
}

Ordinal mul_omega_left(const Ordinal& a) {
  std::vector<Term> out;
  out.reserve(a.terms().size());
  const Ordinal one = Ordinal::finite(1);
  for (const auto& t : a.terms()) out.push_back(Term{add(one, t.exponent), t.coefficient});
  return Ordinal::from_terms(std::move(out));
}

Ordinal subtract_left(const Ordinal& a, const Ordinal& b) {
  if (b > a) throw DomainError("subtract_left requires " + to_string(b) + " <= " + to_string(a));
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::size_t i = 0;
  for (; i < y.size(); ++i) {
    if (x[i] == y[i]) continue;
    if (x[i].exponent == y[i].exponent) {
      std::vector<Term> d{Term{x[i].exponent, x[i].coefficient - y[i].coefficient}};
      d.insert(d.end(), x.begin() + static_cast<std::ptrdiff_t>(i) + 1, x.end());
      return Ordinal::from_terms(std::move(d));
    }
    break;
  }
  return Ordinal::from_terms(std::vector<Term>(x.begin() + static_cast<std::ptrdiff_t>(i), x.end()));
}

Ordinal predecessor(const Ordinal& a) {
  if (!a.is_successor()) throw DomainError(to_string(a) + " is not a successor");
  std::vector<Term> t = a.terms();
  if (--t.back().coefficient == 0) t.pop_back();
  return Ordinal::from_terms(std::move(t));
}

namespace {

// lambda = head + omega^e with head possibly ending in omega^e*(c-1).
struct LimitSplit {
  Ordinal head;
  Ordinal exponent;
};

LimitSplit split_limit(const Ordinal& lambda) {
  std::vector<Term> t = lambda.terms();
  Ordinal e = t.back().exponent;
  if (--t.back().coefficient == 0) t.pop_back();
  return {Ordinal::from_terms(std::move(t)), std::move(e)};
}

}  // namespace

Ordinal fund_seq(const Ordinal& lambda, Natural n) {
  if (!lambda.is_limit()) throw DomainError("fund_seq requires a limit ordinal, got " + to_string(lambda));
  check_natural(n, "fundamental sequence index");
  const auto [head, e] = split_limit(lambda);
  if (e.is_successor()) return add(head, Ordinal::omega_power(predecessor(e), n));
  return add(head, Ordinal::omega_power(fund_seq(e, n)));
}

Natural c_count(const Ordinal& beta, const Ordinal& alpha) {
  if (beta.is_zero()) throw DomainError("C_0 is empty; c_count requires beta > 0");
  if (alpha > beta) throw DomainError("c_count requires alpha <= beta");
  if (beta.is_successor()) return predecessor(beta) < alpha ? 1 : 0;
  if (alpha == beta) throw GuardError("C_" + to_string(beta) + " ∩ " + to_string(beta) + " is infinite");

  const auto [head, e] = split_limit(beta);
  if (alpha <= head) return 0;
  const Ordinal delta = subtract_left(alpha, head);  // 0 < delta < omega^e
  Natural count = 0;
  if (e.is_successor()) {
    // Elements head + omega^b * n; those below alpha are n < k, plus n = k if a remainder follows.
    const Ordinal b = predecessor(e);
    const auto& dt = delta.terms();
    if (dt.front().exponent == b) {
      count = dt.front().coefficient + (dt.size() > 1 ? 1 : 0);
    } else {
      count = 1;
    }
  } else {
    // Elements head + omega^(e[n]); omega^x < delta iff x < d0, or x = d0 and delta > omega^d0.
    const Ordinal d0 = delta.leading_exponent();
    count = c_count(e, d0);
    if (in_c_seq(e, d0) && delta != Ordinal::omega_power(d0)) ++count;
  }
  check_natural(count, "c_count");
  return count;
}

Ordinal c_step(const Ordinal& beta, const Ordinal& alpha) {
  if (!(alpha < beta)) throw DomainError("c_step requires alpha < beta");
  if (beta.is_successor()) return predecessor(beta);
  return fund_seq(beta, c_count(beta, alpha));
}

bool in_c_seq(const Ordinal& beta, const Ordinal& x) {
  if (!(x < beta)) return false;
  return c_step(beta, x) == x;
}

// ---------------------------------------------------------------------------
// Text form

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Ordinal parse_all() {
    skip_ws();
    Ordinal result;
    if (peek() == '0' && is_single_zero()) {
      ++pos_;
    } else {
      result = expr();
    }
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return result;
  }

 private:
  Ordinal expr() {
    std::vector<Term> terms;
    terms.push_back(term());
    skip_ws();
    while (peek() == '+') {
      ++pos_;
      Term t = term();
      if (!(t.exponent < terms.back().exponent)) fail("exponents must be strictly decreasing");
      terms.push_back(std::move(t));
      skip_ws();
    }
    return Ordinal::from_terms(std::move(terms));
  }

  Term term() {
    skip_ws();
    if (peek() == 'w') {
      ++pos_;
      Ordinal exponent = Ordinal::finite(1);
      skip_ws();
      if (peek() == '^') {
        ++pos_;
        skip_ws();
        if (peek() == '(') {
          ++pos_;
          skip_ws();
          exponent = (peek() == '0' && next_is_zero_close()) ? (++pos_, Ordinal{}) : expr();
          skip_ws();
          if (peek() != ')') fail("expected ')'");
          ++pos_;
        } else if (peek() == 'w') {
          ++pos_;
          exponent = Ordinal::omega();
        } else {
          exponent = Ordinal::finite(nat());
        }
      }
      Natural coef = 1;
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        skip_ws();
        coef = nat();
        if (coef == 0) fail("coefficient 0");
      }
      return Term{exponent, coef};
    }
    const Natural n = nat();
    if (n == 0) fail("coefficient 0");
    return Term{Ordinal{}, n};
  }

  Natural nat() {
    if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("expected a natural number");
    Natural v = 0;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      const Natural digit = static_cast<Natural>(s_[pos_] - '0');
      if (v > (ordinal_limits().max_natural - digit) / 10) {
        throw GuardError("ordinal '" + std::string(s_) + "' at offset " + std::to_string(pos_) +
                         ": natural number exceeds the guard " + std::to_string(ordinal_limits().max_natural));
      }
      v = v * 10 + digit;
      ++pos_;
    }
    return v;
  }

  bool is_single_zero() const {
    std::size_t p = pos_ + 1;
    while (p < s_.size() && std::isspace(static_cast<unsigned char>(s_[p]))) ++p;
    return p == s_.size();
  }

  bool next_is_zero_close() const {
    std::size_t p = pos_ + 1;
    while (p < s_.size() && std::isspace(static_cast<unsigned char>(s_[p]))) ++p;
    return p < s_.size() && s_[p] == ')';
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("ordinal '" + std::string(s_) + "' at offset " + std::to_string(pos_) + ": " + msg);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void write_ordinal(std::ostream& os, const Ordinal& a) {
  if (a.is_zero()) {
    os << '0';
    return;
  }
  bool first = true;
  for (const auto& t : a.terms()) {
    if (!first) os << '+';
    first = false;
    if (t.exponent.is_zero()) {
      os << t.coefficient;
      continue;
    }
    os << 'w';
    if (t.exponent.is_finite()) {
      if (t.exponent.to_natural() != 1) os << '^' << t.exponent.to_natural();
    } else if (t.exponent == Ordinal::omega()) {
      os << "^w";
    } else {
      os << "^(";
      write_ordinal(os, t.exponent);
      os << ')';
    }
    if (t.coefficient != 1) os << '*' << t.coefficient;
  }
}

}  // namespace

Ordinal parse_ordinal(std::string_view text) { return Parser(text).parse_all(); }

std::string to_string(const Ordinal& a) {
  std::ostringstream os;
  write_ordinal(os, a);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Ordinal& a) {
  write_ordinal(os, a);
  return os;
}

}  // namespace ordlab
