#include <random>

#include "doctest.h"
#include "ordlab/error.hpp"
#include "ordlab/ordinal.hpp"
#include "support.hpp"

using namespace ordlab;
using testkit::ord;

TEST_CASE("parse produces canonical terms") {
  CHECK(parse_ordinal("0").is_zero());
  const Ordinal a = ord("w^2*3+w+4");
  REQUIRE(a.terms().size() == 3);
  CHECK(a.terms()[0].exponent == Ordinal::finite(2));
  CHECK(a.terms()[0].coefficient == 3);
  CHECK(a.terms()[1].exponent == Ordinal::finite(1));
  CHECK(a.terms()[2].exponent.is_zero());
  CHECK(a.terms()[2].coefficient == 4);
  const Ordinal b = ord("w^w");
  REQUIRE(b.terms().size() == 1);
  CHECK(b.terms()[0].exponent == Ordinal::omega());
  CHECK(ord(" w ^ ( w + 1 ) * 2 ") == Ordinal::omega_power(ord("w+1"), 2));
}

TEST_CASE("parse rejects malformed input") {
  CHECK_THROWS_AS(parse_ordinal(""), ParseError);
  CHECK_THROWS_AS(parse_ordinal("w+w^2"), ParseError);
  CHECK_THROWS_AS(parse_ordinal("w*0"), ParseError);
  CHECK_THROWS_AS(parse_ordinal("w+w"), ParseError);
  CHECK_THROWS_AS(parse_ordinal("3+w"), ParseError);
  CHECK_THROWS_AS(parse_ordinal("w^"), ParseError);
  CHECK_THROWS_AS(parse_ordinal("x"), ParseError);
  CHECK_THROWS_AS(parse_ordinal("w^(w"), ParseError);
  CHECK_THROWS_AS(parse_ordinal("0+1"), ParseError);
}

TEST_CASE("format is canonical") {
  for (const char* s : {"0", "1", "17", "w", "w+1", "w*2+3", "w^2", "w^w", "w^(w+1)*3+w^w+w^5+2", "w^(w^w)",
                        "w^(w^2*2)"}) {
    CHECK(to_string(ord(s)) == s);
  }
  CHECK(to_string(ord("w^1")) == "w");
  CHECK(to_string(ord("w^(0)")) == "1");
  CHECK(to_string(ord("w^(2)")) == "w^2");
}

TEST_CASE("cmp examples") {
  CHECK(cmp(ord("w"), ord("5")) == Cmp::gt);
  CHECK(cmp(ord("w*2+1"), ord("w*2+1")) == Cmp::eq);
  CHECK(cmp(ord("w^2"), ord("w*7")) == Cmp::gt);
  CHECK(cmp(ord("w^w"), ord("w^(w+1)")) == Cmp::lt);
}

TEST_CASE("add examples") {
  CHECK(add(ord("3"), ord("w")) == ord("w"));
  CHECK(add(ord("w"), ord("3")) == ord("w+3"));
  CHECK(add(ord("w^2+w"), ord("w*2")) == ord("w^2+w*3"));
  CHECK(add(ord("w^2+w*5+3"), ord("w^2")) == ord("w^2*2"));
}

TEST_CASE("mul_omega_left examples") {
  CHECK(mul_omega_left(ord("1")) == ord("w"));
  CHECK(mul_omega_left(ord("w")) == ord("w^2"));
  CHECK(mul_omega_left(ord("w^w*2+3")) == ord("w^w*2+w*3"));
  CHECK(mul_omega_left(ord("w^w")) == ord("w^w"));
  CHECK(mul_omega_left(ord("0")).is_zero());
}

TEST_CASE("fund_seq examples and errors") {
  CHECK(fund_seq(ord("w"), 3) == ord("3"));
  CHECK(fund_seq(ord("w^2"), 2) == ord("w*2"));
  CHECK(fund_seq(ord("w^w"), 2) == ord("w^2"));
  CHECK(fund_seq(ord("w*2"), 0) == ord("w"));
  CHECK(fund_seq(ord("w^(w+1)"), 3) == ord("w^w*3"));
  CHECK_THROWS_AS(fund_seq(ord("0"), 1), DomainError);
  CHECK_THROWS_AS(fund_seq(ord("w+1"), 1), DomainError);
}

TEST_CASE("c_count and c_step examples") {
  CHECK(c_count(ord("w"), ord("4")) == 4);
  CHECK(c_step(ord("w"), ord("4")) == ord("4"));
  CHECK(c_count(ord("w+1"), ord("w")) == 0);
  CHECK(c_step(ord("w+1"), ord("w")) == ord("w"));
  CHECK(c_count(ord("w^2"), ord("w+1")) == 2);
  CHECK(c_step(ord("w^2"), ord("w+1")) == ord("w*2"));
  CHECK_THROWS_AS(c_count(ord("3"), ord("w")), DomainError);
}

TEST_CASE("subtract_left and predecessor") {
  CHECK(subtract_left(ord("w^2+w*3+1"), ord("w^2+w")) == ord("w*2+1"));
  CHECK(subtract_left(ord("w^2"), ord("w*5")) == ord("w^2"));
  CHECK(predecessor(ord("w+3")) == ord("w+2"));
  CHECK_THROWS_AS(predecessor(ord("w")), DomainError);
}

TEST_CASE("natural guard fails loudly") {
  const Natural saved = ordinal_limits().max_natural;
  ordinal_limits().max_natural = 100;
  CHECK_THROWS_AS(parse_ordinal("w*101"), GuardError);
  CHECK_THROWS_AS(add(ord("w*60"), ord("w*60")), GuardError);
  ordinal_limits().max_natural = saved;
}

// Property tests over random ordinals.

TEST_CASE("cmp is a total order and add is associative and monotone") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10000; ++i) {
    auto a = testkit::random_below_omega_pow(rng, 5, 4);
    auto b = testkit::random_below_omega_pow(rng, 5, 4);
    auto c = testkit::random_below_omega_pow(rng, 5, 4);
    CHECK((a < b) + (a == b) + (a > b) == 1);
    if (a <= b && b <= c) CHECK(a <= c);
    if (a <= b && b <= a) CHECK(a == b);
    CHECK(add(add(a, b), c) == add(a, add(b, c)));
    if (b < c) CHECK(add(a, b) < add(a, c));
    if (b <= c) CHECK(add(b, a) <= add(c, a));
    CHECK(subtract_left(add(a, b), a) == b);
  }
}

TEST_CASE("fundamental sequences increase below the limit") {
  std::mt19937_64 rng(12);
  int limits = 0;
  for (int i = 0; i < 3000; ++i) {
    auto lam = testkit::random_below_omega_pow(rng, 6, 3);
    if (i % 3 == 0) lam = add(lam, Ordinal::omega_power(ord("w"), 1));
    if (!lam.is_limit()) continue;
    ++limits;
    for (Natural n = 0; n < 6; ++n) {
      CHECK(fund_seq(lam, n) < fund_seq(lam, n + 1));
      CHECK(fund_seq(lam, n + 1) < lam);
    }
  }
  CHECK(limits > 1000);
}

TEST_CASE("c_count and c_step agree with a direct scan") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 5000; ++i) {
    auto x = testkit::random_below_omega_pow(rng, 4, 3);
    auto y = testkit::random_below_omega_pow(rng, 4, 3);
    if (i % 5 == 0) y = add(y, ord("w^w"));
    if (i % 7 == 0) y = add(y, ord("w^(w+2)"));
    if (x > y) std::swap(x, y);
    if (y.is_zero() || (x == y && y.is_limit())) continue;
    CHECK(c_count(y, x) == testkit::scan_c_count(y, x));
    if (x < y) {
      const Ordinal s = c_step(y, x);
      CHECK(s == testkit::scan_c_step(y, x));
      CHECK(in_c_seq(y, s));
      CHECK(s >= x);
      CHECK(s < y);
      CHECK(in_c_seq(y, x) == (s == x));
    }
  }
}

TEST_CASE("parse and format round-trip") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 5000; ++i) {
    auto a = testkit::random_below_omega_pow(rng, 8, 50, 4);
    if (i % 2) a = Ordinal::omega_power(a, 1 + i % 3);
    CHECK(parse_ordinal(to_string(a)) == a);
  }
}
