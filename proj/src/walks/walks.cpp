#include "ordlab/walks.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "ordlab/error.hpp"

namespace ordlab {

std::string_view to_string(WalkFn fn) {
  switch (fn) {
    case WalkFn::rho:
      return "rho";
    case WalkFn::rho1:
      return "rho1";
    case WalkFn::rho2:
      return "rho2";
    case WalkFn::rho_bar:
      return "rhobar";
  }
  return "?";
}

WalkFn parse_walk_fn(std::string_view s) {
  if (s == "rho") return WalkFn::rho;
  if (s == "rho1") return WalkFn::rho1;
  if (s == "rho2") return WalkFn::rho2;
  if (s == "rhobar" || s == "rho_bar") return WalkFn::rho_bar;
  throw ParseError("unknown walk function '" + std::string(s) + "'");
}

namespace {

void require_ordered(const Ordinal& alpha, const Ordinal& beta) {
  if (alpha > beta) throw DomainError("walk requires alpha <= beta, got " + to_string(alpha) + " > " + to_string(beta));
}

class DepthGuard {
 public:
  DepthGuard(std::size_t& depth, std::size_t& high_water, std::size_t limit) : depth_(depth) {
    if (++depth_ > limit) {
      --depth_;
      throw GuardError("walk recursion depth exceeds " + std::to_string(limit));
    }
    high_water = std::max(high_water, depth_);
  }
  ~DepthGuard() { --depth_; }
  DepthGuard(const DepthGuard&) = delete;
  DepthGuard& operator=(const DepthGuard&) = delete;

 private:
  std::size_t& depth_;
};

}  // namespace

std::vector<Ordinal> walk_trace(const Ordinal& alpha, const Ordinal& beta) {
  require_ordered(alpha, beta);
  std::vector<Ordinal> trace{beta};
  while (trace.back() != alpha) trace.push_back(c_step(trace.back(), alpha));
  return trace;
}

WalkContext::Table& WalkContext::table(WalkFn fn) {
  switch (fn) {
    case WalkFn::rho:
      return rho_;
    case WalkFn::rho1:
      return rho1_;
    default:
      return rho2_;
  }
}

WalkContext::SublevelTable& WalkContext::sublevel_table(WalkFn fn) {
  return fn == WalkFn::rho1 ? sub_rho1_ : sub_rho_;
}

void WalkContext::store(Table& t, PairKey key, Natural v) {
  if (stats_.entries >= limits_.max_memo) {
    throw GuardError("walk memo exceeds " + std::to_string(limits_.max_memo) + " entries");
  }
  if (t.emplace(std::move(key), v).second) ++stats_.entries;
}

Natural WalkContext::walk(WalkFn fn, const Ordinal& alpha, const Ordinal& beta) {
  if (alpha == beta) return 0;
  if (!memoize_) return compute(fn, alpha, beta);
  Table& t = table(fn);
  PairKey key{alpha, beta};
  if (auto it = t.find(key); it != t.end()) {
    ++stats_.hits;
    return it->second;
  }
  ++stats_.misses;
  const Natural v = compute(fn, alpha, beta);
  store(t, std::move(key), v);
  return v;
}

// One step of the recursions. A successor beta = gamma + n walks down its
// finite tail one step at a time without meeting any C-sequence element
// below alpha, so the whole tail is taken at once:
//   rho(alpha, gamma + n) = rho(alpha, gamma),  rho2(alpha, gamma + n) = n + rho2(alpha, gamma)
// for alpha <= gamma, and rho = 0, rho2 = n - m for alpha = gamma + m.
Natural WalkContext::compute(WalkFn fn, const Ordinal& alpha, const Ordinal& beta) {
  DepthGuard guard(depth_, stats_.max_depth, limits_.max_depth);
  if (beta.is_successor()) {
    const Ordinal gamma = beta.without_finite_part();
    const Natural n = beta.finite_part();
    if (alpha >= gamma) {
      const Natural m = alpha.finite_part();
      return fn == WalkFn::rho2 ? n - m : 0;
    }
    const Natural below = walk(fn, alpha, gamma);
    return fn == WalkFn::rho2 ? n + below : below;
  }

  const Natural count = c_count(beta, alpha);
  const Ordinal next = fund_seq(beta, count);
  switch (fn) {
    case WalkFn::rho2:
      return walk(fn, alpha, next) + 1;
    case WalkFn::rho1:
      return std::max(count, walk(fn, alpha, next));
    default: {
      Natural v = std::max(count, walk(fn, alpha, next));
      for (Natural i = 0; i < count; ++i) v = std::max(v, walk(fn, fund_seq(beta, i), alpha));
      return v;
    }
  }
}

Natural WalkContext::rho(const Ordinal& alpha, const Ordinal& beta) {
  require_ordered(alpha, beta);
  return walk(WalkFn::rho, alpha, beta);
}

Natural WalkContext::rho1(const Ordinal& alpha, const Ordinal& beta) {
  require_ordered(alpha, beta);
  return walk(WalkFn::rho1, alpha, beta);
}

Natural WalkContext::rho2(const Ordinal& alpha, const Ordinal& beta) {
  require_ordered(alpha, beta);
  return walk(WalkFn::rho2, alpha, beta);
}

Natural WalkContext::rho_bar(const Ordinal& alpha, const Ordinal& beta) {
  const Natural r = rho(alpha, beta);
  if (r >= 62) throw GuardError("2^" + std::to_string(r) + " overflows rho_bar");
  const Natural size = sublevel(WalkFn::rho, alpha, r).size();
  const Natural odd = 2 * size + 1;
  const Natural scale = Natural{1} << r;
  if (odd > std::numeric_limits<Natural>::max() / scale) throw GuardError("rho_bar overflow");
  return scale * odd;
}

Natural WalkContext::eval(WalkFn fn, const Ordinal& alpha, const Ordinal& beta) {
  switch (fn) {
    case WalkFn::rho:
      return rho(alpha, beta);
    case WalkFn::rho1:
      return rho1(alpha, beta);
    case WalkFn::rho2:
      return rho2(alpha, beta);
    case WalkFn::rho_bar:
      return rho_bar(alpha, beta);
  }
  return 0;
}

std::vector<Ordinal> WalkContext::sublevel(WalkFn fn, const Ordinal& alpha, Natural c) {
  if (fn != WalkFn::rho && fn != WalkFn::rho1) {
    throw Unsupported("sublevel sets are only enumerable for rho and rho1 (" + std::string(to_string(fn)) +
                      " sublevel sets are infinite)");
  }
  if (!memoize_) return sublevel_impl(fn, alpha, c);
  SublevelTable& t = sublevel_table(fn);
  SublevelKey key{alpha, c};
  if (auto it = t.find(key); it != t.end()) return it->second;
  auto result = sublevel_impl(fn, alpha, c);
  t.emplace(std::move(key), result);
  return result;
}

// Exact enumeration of {x <= alpha : f(x, alpha) <= c} for f in {rho, rho1}.
//
// Successor alpha = gamma + n: f(x, gamma + n) = f(x, gamma) for x <= gamma
// and f(x, alpha) = 0 on (gamma, alpha], so the set is sublevel(gamma, c)
// plus the finite tail.
//
// Limit alpha: both recursions give f(x, alpha) >= |C_alpha ∩ x| = k and
// f(x, alpha) >= f(x, alpha[k]) where alpha[k] = min(C_alpha \ x). Hence
// f(x, alpha) <= c forces k <= c and x in sublevel(alpha[k], c), so the
// candidates lie in {alpha} ∪ ⋃_{k<=c} sublevel(alpha[k], c). The candidates
// are then filtered by the definition.
std::vector<Ordinal> WalkContext::sublevel_impl(WalkFn fn, const Ordinal& alpha, Natural c) {
  DepthGuard guard(depth_, stats_.max_depth, limits_.max_depth);
  std::vector<Ordinal> out;
  auto check_size = [&](std::size_t n) {
    if (n > limits_.max_sublevel) {
      throw GuardError("sublevel set of " + to_string(alpha) + " exceeds " + std::to_string(limits_.max_sublevel) +
                       " elements");
    }
  };

  if (alpha.is_zero()) return {Ordinal{}};

  if (alpha.is_successor()) {
    const Ordinal gamma = alpha.without_finite_part();
    const Natural n = alpha.finite_part();
    check_size(n);
    out = gamma.is_zero() ? std::vector<Ordinal>{Ordinal{}} : sublevel(fn, gamma, c);
    for (Natural i = 1; i <= n; ++i) out.push_back(add(gamma, Ordinal::finite(i)));
    check_size(out.size());
    std::erase_if(out, [&](const Ordinal& x) { return walk(fn, x, alpha) > c; });
    return out;
  }

  out.push_back(alpha);
  for (Natural k = 0; k <= c; ++k) {
    const auto part = sublevel(fn, fund_seq(alpha, k), c);
    out.insert(out.end(), part.begin(), part.end());
    check_size(out.size());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::erase_if(out, [&](const Ordinal& x) { return walk(fn, x, alpha) > c; });
  return out;
}

}  // namespace ordlab
