#include <random>

#include "doctest.h"
#include "ordlab/error.hpp"
#include "ordlab/matrix.hpp"
#include "support.hpp"

using namespace ordlab;
using testkit::ord;

namespace {

std::vector<Ordinal> mixed_universe() {
  std::vector<Ordinal> u;
  for (Natural n = 0; n < 30; ++n) u.push_back(Ordinal::finite(n));
  for (const char* s : {"w", "w+1", "w*2", "w^2", "w^w"}) u.push_back(ord(s));
  return u;
}

class NeverMember final : public MatrixProvider {
 public:
  bool in_index_set(const Ordinal&) const override { return true; }
  bool member(const Ordinal&, Natural, const Ordinal&) const override { return false; }
  std::string replay_args() const override { return "--provider never"; }
};

// All pairs i < j, straight from the definition.
std::optional<std::pair<std::size_t, std::size_t>> naive_unbounded(const PairFunction& f,
                                                                   const std::vector<std::vector<Ordinal>>& fam,
                                                                   Natural xi) {
  for (std::size_t i = 0; i < fam.size(); ++i) {
    for (std::size_t j = i + 1; j < fam.size(); ++j) {
      bool ok = true;
      for (const auto& x : fam[i]) {
        for (const auto& y : fam[j]) ok = ok && (x < y ? f(x, y) : f(y, x)) > xi;
      }
      if (ok) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("function provider membership examples") {
  auto p = make_walk_provider(WalkFn::rho);
  CHECK(p->member(ord("1"), 1, ord("w")));
  CHECK_FALSE(p->member(ord("1"), 0, ord("w")));
  CHECK_FALSE(p->member(ord("w"), 0, ord("w")));
  CHECK(p->strong());
  CHECK_FALSE(make_walk_provider(WalkFn::rho1)->strong());
  CHECK_THROWS_AS(make_walk_provider(WalkFn::rho2), Unsupported);
}

TEST_CASE("rho_F examples") {
  auto p = make_walk_provider(WalkFn::rho);
  CHECK(rho_F(*p, ord("1"), ord("w"), 10) == 1);
  CHECK(rho_F(*p, ord("w*2+3"), ord("w*2+4"), 10) == 0);
  CHECK_THROWS_AS(rho_F(NeverMember{}, ord("1"), ord("w"), 10), NotFoundWithinBound);
  CHECK_THROWS_AS(rho_F(*p, ord("w"), ord("w"), 10), DomainError);
}

TEST_CASE("rho_F round-trips the defining function") {
  std::mt19937_64 rng(31);
  for (auto fn : {WalkFn::rho, WalkFn::rho1}) {
    auto p = make_walk_provider(fn);
    WalkContext ctx;
    int n = 0;
    while (n < 10000) {
      auto a = testkit::random_below_omega_pow(rng, 4, 3);
      auto b = testkit::random_below_omega_pow(rng, 4, 3);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      ++n;
      // Search ignores the direct answer: compare the least covering xi.
      Natural least = 0;
      while (!p->member(a, least, b)) ++least;
      CHECK(least == ctx.eval(fn, a, b));
      CHECK(rho_F(*p, a, b, 100) == least);
    }
  }
}

TEST_CASE("axioms hold on the mixed universe") {
  auto p = make_walk_provider(WalkFn::rho);
  const AxiomReport r = verify_axioms(*p, mixed_universe(), 8, 1);
  for (const auto& rec : r.records) {
    INFO(rec.id, " ", to_json(rec).dump());
    CHECK(rec.status == Status::pass);
    CHECK(rec.checks > 0);
  }
  CHECK(r.records.size() == 6);
}

TEST_CASE("rho1 provider skips G4 rather than passing it") {
  auto p = make_walk_provider(WalkFn::rho1);
  const AxiomReport r = verify_axioms(*p, mixed_universe(), 4, 1);
  CHECK(r.status("G4") == Status::skipped);
  CHECK(r.status("G1") == Status::pass);
  CHECK(r.status("G3") == Status::pass);
}

TEST_CASE("a never-member provider fails G1 with a witness") {
  const AxiomReport r = verify_axioms(NeverMember{}, {ord("0"), ord("1")}, 2, 1, {.search_bound = 5});
  REQUIRE(r.status("G1") == Status::fail);
  const auto* rec = r.find("G1");
  CHECK(rec->counterexample["gamma"] == "0");
  CHECK(rec->counterexample["alpha"] == "1");
  CHECK(r.status("G3") == Status::skipped);
  CHECK(r.status("G4") == Status::skipped);
}

TEST_CASE("empty universe passes vacuously") {
  auto p = make_walk_provider(WalkFn::rho);
  const AxiomReport r = verify_axioms(*p, {}, 8, 1);
  CHECK(r.status("G1") == Status::pass);
  CHECK(r.status("G2") == Status::pass);
  CHECK(r.status("G3") == Status::pass);
  CHECK(r.status("G4") == Status::pass);
}

TEST_CASE("every single flipped membership is detected") {
  auto base = make_walk_provider(WalkFn::rho);
  const std::vector<Ordinal> u{ord("0"), ord("1"), ord("2"), ord("5"), ord("w"), ord("w+1"), ord("w*2"), ord("w^2")};
  for (std::size_t ai = 0; ai < u.size(); ++ai) {
    for (std::size_t gi = 0; gi < ai; ++gi) {
      for (Natural xi = 0; xi <= 4; ++xi) {
        auto flipped = make_flipped(base, u[gi], xi, u[ai]);
        const AxiomReport r = verify_axioms(*flipped, u, 4, 1);
        INFO(to_string(u[gi]), " ", xi, " ", to_string(u[ai]));
        CHECK(r.any_fail());
        for (const auto& rec : r.records) {
          if (rec.status == Status::fail) {
            CHECK_FALSE(rec.counterexample.is_null());
            CHECK(rec.replay.find("--flip") != std::string::npos);
          }
        }
      }
    }
  }
}

TEST_CASE("G3 witness covers sampled points") {
  std::mt19937_64 rng(32);
  for (auto fn : {WalkFn::rho, WalkFn::rho1}) {
    auto p = make_walk_provider(fn);
    for (int i = 0; i < 3000; ++i) {
      auto [g, a, b] = testkit::random_triple(rng, 4, 3);
      const Natural xi = i % 6;
      CHECK_FALSE(check_g3(*p, g, xi, a, b).has_value());
      if (fn == WalkFn::rho) CHECK_FALSE(check_g4(*p, g, xi, a, b).has_value());
      CHECK_FALSE(check_directed(*p, g, xi, a, (i / 6) % 5, b).has_value());
    }
  }
}

TEST_CASE("enumeration agrees with member below w*3") {
  auto p = make_walk_provider(WalkFn::rho);
  for (Natural j = 0; j < 3; ++j) {
    for (Natural n = 0; n < 8; ++n) {
      const Ordinal a = add(Ordinal::omega_power(Ordinal::finite(1), j), Ordinal::finite(n));
      for (Natural xi = 0; xi <= 5; ++xi) CHECK_FALSE(check_enumerate(*p, xi, a).has_value());
    }
  }
}

TEST_CASE("unbounded_search examples") {
  WalkContext ctx;
  PairFunction f = [&](const Ordinal& a, const Ordinal& b) { return ctx.rho(a, b); };
  const std::vector<std::vector<Ordinal>> fam{{ord("1")}, {ord("2")}, {ord("w")}};
  auto w0 = unbounded_search(f, fam, 0);
  REQUIRE(w0);
  CHECK(w0->first == 0);
  CHECK(w0->second == 2);
  auto w1 = unbounded_search(f, fam, 1);
  REQUIRE(w1);
  CHECK(w1->first == 1);
  CHECK(w1->second == 2);
  std::vector<std::vector<Ordinal>> finite;
  for (Natural k = 0; k < 10; ++k) finite.push_back({Ordinal::finite(k)});
  CHECK_FALSE(unbounded_search(f, finite, 0).has_value());
  CHECK_THROWS_AS(unbounded_search(f, {{ord("1"), ord("2")}, {ord("2")}}, 0), DomainError);
}

TEST_CASE("unbounded_search agrees with the naive double loop") {
  std::mt19937_64 rng(33);
  WalkContext ctx;
  PairFunction f = [&](const Ordinal& a, const Ordinal& b) { return ctx.rho(a, b); };
  for (int trial = 0; trial < 300; ++trial) {
    std::set<Ordinal> used;
    std::vector<std::vector<Ordinal>> fam;
    const int size = static_cast<int>(rng() % 51);
    for (int i = 0; i < size; ++i) {
      std::vector<Ordinal> s;
      const int k = 1 + static_cast<int>(rng() % 3);
      for (int e = 0; e < k; ++e) {
        auto x = testkit::random_below_omega_pow(rng, 3, 4);
        if (used.insert(x).second) s.push_back(x);
      }
      if (!s.empty()) fam.push_back(s);
    }
    const Natural xi = rng() % 4;
    auto got = unbounded_search(f, fam, xi);
    auto want = naive_unbounded(f, fam, xi);
    REQUIRE(got.has_value() == want.has_value());
    if (got) {
      CHECK(got->first == want->first);
      CHECK(got->second == want->second);
    }
  }
}

TEST_CASE("condition (H) counts") {
  WalkContext ctx;
  CHECK(condition_H_count(ctx, WalkFn::rho, ord("w"), 0) == 1);
  CHECK(condition_H_count(ctx, WalkFn::rho, ord("w"), 2) == 3);
  CHECK_THROWS_AS(condition_H_count(ctx, WalkFn::rho2, ord("w"), 1), Unsupported);
}
