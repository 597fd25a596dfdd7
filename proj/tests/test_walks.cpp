#include <random>
#include <set>

#include "doctest.h"
#include "ordlab/error.hpp"
#include "ordlab/walks.hpp"
#include "support.hpp"

using namespace ordlab;
using testkit::ord;

TEST_CASE("walk examples") {
  WalkContext ctx;
  for (const char* a : {"0", "5", "w", "w^w+3"}) {
    CHECK(ctx.rho(ord(a), ord(a)) == 0);
    CHECK(ctx.rho1(ord(a), ord(a)) == 0);
    CHECK(ctx.rho2(ord(a), ord(a)) == 0);
    CHECK(ctx.rho1(ord(a), add(ord(a), ord("1"))) == 0);
    CHECK(ctx.rho2(ord(a), add(ord(a), ord("1"))) == 1);
  }
  CHECK(ctx.rho(ord("1"), ord("w")) == 1);
  CHECK(ctx.rho(ord("2"), ord("w")) == 2);
  CHECK(ctx.rho1(ord("1"), ord("w")) == 1);
  CHECK(ctx.rho1(ord("2"), ord("w")) == 2);
  CHECK(ctx.rho2(ord("5"), ord("w*2")) == 2);
  CHECK(ctx.rho_bar(ord("0"), ord("1")) == 3);
  CHECK(ctx.rho_bar(ord("0"), ord("w")) == 3);
  CHECK(ctx.rho_bar(ord("1"), ord("w")) == 10);
  CHECK_THROWS_AS(ctx.rho(ord("w"), ord("3")), DomainError);
  CHECK_THROWS_AS(ctx.rho2(ord("w+1"), ord("w")), DomainError);
}

TEST_CASE("walk_trace examples") {
  CHECK(walk_trace(ord("w"), ord("w")) == std::vector<Ordinal>{ord("w")});
  CHECK(walk_trace(ord("w"), ord("w+1")) == std::vector<Ordinal>{ord("w+1"), ord("w")});
  CHECK(walk_trace(ord("5"), ord("w*2")) == std::vector<Ordinal>{ord("w*2"), ord("w"), ord("5")});
  CHECK_THROWS_AS(walk_trace(ord("w"), ord("1")), DomainError);
}

TEST_CASE("sublevel examples") {
  WalkContext ctx;
  CHECK(ctx.sublevel_rho(ord("0"), 0) == std::vector<Ordinal>{ord("0")});
  CHECK(ctx.sublevel_rho(ord("w"), 0) == std::vector<Ordinal>{ord("0"), ord("w")});
  CHECK(ctx.sublevel_rho(ord("w"), 2) == std::vector<Ordinal>{ord("0"), ord("1"), ord("2"), ord("w")});
  CHECK_THROWS_AS(ctx.sublevel(WalkFn::rho2, ord("w"), 1), Unsupported);
}

TEST_CASE("walks agree with the literal recursions") {
  std::mt19937_64 rng(21);
  WalkContext ctx;
  testkit::NaiveWalks naive;
  for (int i = 0; i < 3000; ++i) {
    auto a = testkit::random_below_omega_pow(rng, 4, 3);
    auto b = testkit::random_below_omega_pow(rng, 4, 3);
    if (a > b) std::swap(a, b);
    CHECK(ctx.rho(a, b) == naive.rho(a, b));
    CHECK(ctx.rho1(a, b) == naive.rho1(a, b));
    CHECK(ctx.rho2(a, b) == naive.rho2(a, b));
  }
}

TEST_CASE("memoized and plain evaluation agree") {
  std::mt19937_64 rng(22);
  WalkContext memo;
  WalkContext plain(WalkContext::Limits{}, false);
  for (int i = 0; i < 2000; ++i) {
    auto a = testkit::random_below_omega_pow(rng, 5, 3);
    auto b = testkit::random_below_omega_pow(rng, 5, 3);
    if (a > b) std::swap(a, b);
    for (auto fn : {WalkFn::rho, WalkFn::rho1, WalkFn::rho2}) CHECK(memo.eval(fn, a, b) == plain.eval(fn, a, b));
  }
  CHECK(memo.stats().hits > 0);
  CHECK(plain.stats().entries == 0);
}

TEST_CASE("trace length is rho2 plus one") {
  std::mt19937_64 rng(23);
  WalkContext ctx;
  for (int i = 0; i < 2000; ++i) {
    auto a = testkit::random_below_omega_pow(rng, 5, 4);
    auto b = testkit::random_below_omega_pow(rng, 5, 4);
    if (a > b) std::swap(a, b);
    const auto tr = walk_trace(a, b);
    CHECK(tr.size() == ctx.rho2(a, b) + 1);
    for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr[k] < tr[k - 1]);
  }
}

TEST_CASE("rho dominates rho1 and rho_bar separates first coordinates") {
  std::mt19937_64 rng(24);
  WalkContext ctx;
  for (int i = 0; i < 2000; ++i) {
    auto [a, b, c] = testkit::random_triple(rng, 3, 3);
    CHECK(ctx.rho(a, b) >= ctx.rho1(a, b));
    CHECK(ctx.rho(a, c) <= std::max(ctx.rho(a, b), ctx.rho(b, c)));
    CHECK(ctx.rho(a, b) <= std::max(ctx.rho(a, c), ctx.rho(b, c)));
    CHECK(ctx.rho_bar(a, c) != ctx.rho_bar(b, c));
  }
}

TEST_CASE("sublevel sets match a scan below w*3") {
  // Below w*3 every x <= alpha is w*j + m; walking from alpha = w*j + n down
  // to x below w*j visits w*j, whose C-sequence count contributes m, so
  // points with m > c (or m > n + c when x sits below alpha's own block) never
  // qualify. Scanning m <= n + c + 5 therefore covers the whole set.
  WalkContext ctx;
  testkit::NaiveWalks naive;
  for (Natural j = 0; j < 3; ++j) {
    for (Natural n = 0; n <= 12; ++n) {
      const Ordinal alpha = add(Ordinal::omega_power(Ordinal::finite(1), j), Ordinal::finite(n));
      for (Natural c = 0; c <= 5; ++c) {
        for (auto fn : {WalkFn::rho, WalkFn::rho1}) {
          std::vector<Ordinal> scan;
          for (Natural jj = 0; jj <= j; ++jj) {
            for (Natural m = 0; m <= n + c + 5; ++m) {
              const Ordinal x = add(Ordinal::omega_power(Ordinal::finite(1), jj), Ordinal::finite(m));
              if (x > alpha) continue;
              const Natural v = fn == WalkFn::rho ? naive.rho(x, alpha) : naive.rho1(x, alpha);
              if (v <= c) scan.push_back(x);
            }
          }
          std::sort(scan.begin(), scan.end());
          CHECK(ctx.sublevel(fn, alpha, c) == scan);
        }
      }
    }
  }
}

TEST_CASE("guards trip with diagnostics") {
  WalkContext::Limits lim;
  lim.max_depth = 3;
  WalkContext ctx(lim);
  CHECK_THROWS_AS(ctx.rho(ord("w^3*5+w^2*5+w*5+7"), ord("w^4")), GuardError);
  WalkContext::Limits small;
  small.max_memo = 2;
  WalkContext ctx2(small);
  CHECK_THROWS_AS(ctx2.rho(ord("3"), ord("w^3")), GuardError);
}
