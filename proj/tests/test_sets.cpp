#include <numeric>
#include <random>

#include "doctest.h"
#include "ordlab/error.hpp"
#include "ordlab/omega_sets.hpp"
#include "support.hpp"

using namespace ordlab;
using testkit::ord;

namespace {

std::string data_path(const char* name) { return std::string(ORDLAB_DATA_DIR) + "/" + name; }

SetExpr S(const char* text) { return parse_set(text); }

std::vector<Natural> elems(const Finiteness& f) { return f.elements; }

// Random expression together with a bitmap evaluator that never looks at the
// library's normal forms. `stable` bounds every prefix and cut; `period` is a
// common multiple of every period.
struct Gen {
  SetExpr expr;
  std::function<bool(Natural)> oracle;
  Natural stable = 0;
  Natural period = 1;
};

Gen random_expr(std::mt19937_64& rng, int depth) {
  const int pick = depth <= 0 ? 0 : static_cast<int>(rng() % 7);
  if (pick == 0) {
    EPSet e;
    e.prefix.resize(rng() % 6);
    for (std::size_t i = 0; i < e.prefix.size(); ++i) e.prefix[i] = rng() % 2;
    e.period.resize(1 + rng() % 6);
    for (std::size_t i = 0; i < e.period.size(); ++i) e.period[i] = rng() % 2;
    const auto raw = e;
    return {ep_set(e), [raw](Natural x) {
              if (x < raw.prefix.size()) return static_cast<bool>(raw.prefix[x]);
              return static_cast<bool>(raw.period[(x - raw.prefix.size()) % raw.period.size()]);
            },
            raw.prefix.size(), raw.period.size()};
  }
  if (pick == 6) {
    const std::size_t k = 1 + rng() % 3;
    std::vector<Gen> kids;
    std::vector<Natural> cuts;
    Natural cut = rng() % 4;
    for (std::size_t i = 0; i < k; ++i) {
      kids.push_back(random_expr(rng, depth - 1));
      cuts.push_back(cut);
      cut += 1 + rng() % 6;
    }
    Gen g;
    std::vector<SetExpr> ex;
    for (const auto& kd : kids) {
      ex.push_back(kd.expr);
      g.stable = std::max(g.stable, kd.stable);
      g.period = std::lcm(g.period, kd.period);
    }
    g.stable = std::max(g.stable, cuts.back());
    g.expr = set_diag(ex, cuts);
    g.oracle = [kids, cuts](Natural x) {
      for (std::size_t i = 0; i < kids.size(); ++i) {
        if (cuts[i] <= x && kids[i].oracle(x)) return true;
      }
      return false;
    };
    return g;
  }
  if (pick == 5) {
    Gen a = random_expr(rng, depth - 1);
    auto f = a.oracle;
    return {set_comp(a.expr), [f](Natural x) { return !f(x); }, a.stable, a.period};
  }
  Gen a = random_expr(rng, depth - 1);
  Gen b = random_expr(rng, depth - 1);
  Gen g;
  g.stable = std::max(a.stable, b.stable);
  g.period = std::lcm(a.period, b.period);
  auto fa = a.oracle;
  auto fb = b.oracle;
  switch (pick) {
    case 1:
      g.expr = set_union(a.expr, b.expr);
      g.oracle = [fa, fb](Natural x) { return fa(x) || fb(x); };
      break;
    case 2:
      g.expr = set_inter(a.expr, b.expr);
      g.oracle = [fa, fb](Natural x) { return fa(x) && fb(x); };
      break;
    case 3:
      g.expr = set_diff(a.expr, b.expr);
      g.oracle = [fa, fb](Natural x) { return fa(x) && !fb(x); };
      break;
    default:
      g.expr = set_sym(a.expr, b.expr);
      g.oracle = [fa, fb](Natural x) { return fa(x) != fb(x); };
      break;
  }
  return g;
}

PreGap mod4() { return load_pregap(data_path("gap_mod4.txt")); }

std::vector<Ordinal> limit_indices(std::size_t before, std::size_t after) {
  std::vector<Ordinal> idx;
  for (Natural i = 0; i < before; ++i) idx.push_back(Ordinal::finite(i));
  for (Natural i = 0; i < after; ++i) idx.push_back(add(Ordinal::omega(), Ordinal::finite(i)));
  return idx;
}

}  // namespace

TEST_CASE("member examples") {
  const auto evens = S("(mod 2 0)");
  CHECK(member(evens, 4));
  CHECK_FALSE(member(set_comp(evens), 4));
  CHECK(member(set_diag({evens, S("(mod 2 1)")}, {0, 10}), 11));
  CHECK_FALSE(member(set_diag({evens, S("(mod 2 1)")}, {0, 10}), 9));
  CHECK(member(S("(ep prefix=01 period=001)"), 1));
  CHECK(member(S("(ep prefix=01 period=001)"), 4));
  CHECK_FALSE(member(S("(ep prefix=01 period=001)"), 3));
  CHECK(member(S("all"), 123));
  CHECK_FALSE(member(S("empty"), 0));
}

TEST_CASE("finiteness examples") {
  const auto evens = S("(mod 2 0)");
  const auto odds = S("(mod 2 1)");
  auto f = finiteness(set_inter(evens, odds));
  CHECK(f.kind == Finiteness::Kind::finite);
  CHECK(f.elements.empty());
  CHECK(finiteness(evens).kind == Finiteness::Kind::infinite);
  f = finiteness(set_sym(evens, set_union(evens, S("(fin 3)"))));
  CHECK(f.kind == Finiteness::Kind::finite);
  CHECK(elems(f) == std::vector<Natural>{3});

  // A period guard that is too small leaves the question open and scans instead.
  SetGuards tight;
  tight.max_period = 8;
  tight.scan_bound = 100;
  f = finiteness(set_inter(S("(mod 3 0)"), S("(mod 5 0)")), tight);
  CHECK(f.kind == Finiteness::Kind::undecided);
  CHECK(f.scanned == 100);
  CHECK(f.hits == 7);
  CHECK_THROWS_AS(finite_members(set_inter(S("(mod 3 0)"), S("(mod 5 0)")), tight), Undecided);
  CHECK_THROWS_AS(finite_members(evens), DomainError);
}

TEST_CASE("normal form and printing") {
  CHECK(to_ep(S("(ep prefix=1010 period=10)")) == to_ep(S("(mod 2 0)")));
  CHECK(to_ep(S("(ep prefix= period=0101)")) == to_ep(S("(mod 2 1)")));
  CHECK(to_string(S("(mod 4 0 1)")) == "(ep prefix= period=1100)");
  CHECK(to_string(S("(fin 0 2)")) == "(ep prefix=101 period=0)");
  const char* texts[] = {"(diff (mod 2 0) (fin 0 2))", "(comp (mod 3 1))",
                         "(diag ((mod 2 0) (mod 2 1)) cuts=(0 10))", "(union (mod 4 0) (fin 2) (fin 5))"};
  for (const char* t : texts) {
    const auto e = S(t);
    const auto again = parse_set(to_string(e));
    CHECK(to_string(again) == to_string(e));
    for (Natural x = 0; x < 64; ++x) CHECK(member(again, x) == member(e, x));
  }
  std::map<std::string, SetExpr> names{{"E", S("(mod 2 0)")}};
  CHECK(member(parse_set("(comp E)", names), 1));
}

TEST_CASE("parser errors") {
  for (const char* bad : {"(ep prefix=01 period=)", "(ep prefix=012 period=1)", "(mod 0 1)", "(mod 4 5)",
                          "(union (mod 2 0))", "(diag ((mod 2 0) (mod 2 1)) cuts=(5 5))",
                          "(diag ((mod 2 0)) cuts=(1 2))", "(frob 1)", "(comp X)", "(mod 2 0", "(mod 2 0))", ")"}) {
    INFO(bad);
    CHECK_THROWS_AS(parse_set(bad), ParseError);
  }
}

TEST_CASE("member and normal forms agree with a bitmap oracle") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1500; ++i) {
    const Gen g = random_expr(rng, 3);
    const Natural bound = 4 * (g.stable + g.period);
    const auto ep = to_ep(g.expr);
    REQUIRE(ep);
    bool same = true;
    for (Natural x = 0; x < bound && same; ++x) {
      const bool want = g.oracle(x);
      same = member(g.expr, x) == want && ep->contains(x) == want;
    }
    INFO(to_string(g.expr));
    CHECK(same);

    // Finiteness: past every prefix and cut the set repeats with g.period.
    bool tail = false;
    std::vector<Natural> below;
    for (Natural x = 0; x < g.stable + g.period; ++x) {
      if (!g.oracle(x)) continue;
      if (x >= g.stable) tail = true;
      else below.push_back(x);
    }
    const auto f = finiteness(g.expr);
    if (tail) {
      CHECK(f.kind == Finiteness::Kind::infinite);
    } else {
      CHECK(f.kind == Finiteness::Kind::finite);
      CHECK(f.elements == below);
    }
  }
}

TEST_CASE("rho_TO examples") {
  Tower t{{ord("0"), ord("1")}, {S("(mod 2 0)"), S("(comp (fin 0))")}, {}};
  CHECK(rho_TO(t, ord("0"), ord("0")) == 0);
  CHECK(rho_TO(t, ord("0"), ord("1")) == 1);
  Tower u{{ord("0"), ord("1")}, {S("(mod 2 0)"), S("(union (diff (mod 2 0) (fin 0 2)) (mod 2 1))")}, {}};
  CHECK(rho_TO(u, ord("0"), ord("1")) == 3);
  CHECK_THROWS_AS(rho_TO(t, ord("1"), ord("0")), DomainError);
  CHECK_THROWS_AS(rho_TO(t, ord("0"), ord("2")), DomainError);
}

TEST_CASE("tower manifests") {
  const auto t = load_tower(data_path("tower_two.txt"));
  REQUIRE(t.indices.size() == 2);
  CHECK(t.certificates.at({ord("0"), ord("1")}) == 1);
  const auto r = validate_tower(t);
  for (const auto& rec : r.records) {
    INFO(to_json(rec).dump());
    CHECK(rec.status == Status::pass);
  }
  const auto again = parse_tower(to_manifest(t));
  CHECK(to_manifest(again) == to_manifest(t));

  CHECK_THROWS_AS(parse_tower("index 1 a=(mod 2 0)\nindex 0 a=(mod 2 1)\n"), ParseError);
  CHECK_THROWS_AS(parse_tower("index 0 a=X\n"), ParseError);
  CHECK_THROWS_AS(parse_tower("index 0 a=(mod 2 0) b=(mod 2 1)\n"), ParseError);
  CHECK_THROWS_AS(parse_tower("index 0 a=(mod 2 0)\ncert 0 3 a=1\n"), ParseError);
  CHECK_THROWS_AS(parse_tower("frob\n"), ParseError);
  CHECK_THROWS_AS(parse_pregap("index 0 a=(mod 2 0)\n"), ParseError);
  CHECK_THROWS_AS(load_tower(data_path("missing.txt")), ConfigError);
}

TEST_CASE("tower validation failures") {
  // Reversed order: a_0 = w \ {0}, a_1 = evens.
  Tower rev{{ord("0"), ord("1")}, {S("(comp (fin 0))"), S("(mod 2 0)")}, {}};
  const auto r = validate_tower(rev, "ordlab tower verify --tower rev.txt");
  const auto* rec = r.find("tower-almost-increasing");
  REQUIRE(rec);
  CHECK(rec->status == Status::fail);
  CHECK(rec->counterexample["alpha"] == "0");
  CHECK(rec->counterexample["beta"] == "1");
  CHECK(rec->replay == "ordlab tower verify --tower rev.txt");
  CHECK(r.status("tower-strict") == Status::fail);

  // A certificate that undershoots the difference.
  Tower bad = load_tower(data_path("tower_two.txt"));
  bad.certificates[{ord("0"), ord("1")}] = 0;
  CHECK(validate_tower(bad).status("tower-certificates") == Status::fail);
  // A loose certificate is still valid.
  bad.certificates[{ord("0"), ord("1")}] = 9;
  const auto loose = validate_tower(bad);
  CHECK(loose.status("tower-certificates") == Status::pass);
  CHECK(loose.find("tower-certificates")->details["not_tight"] == 1);
}

TEST_CASE("build_tower") {
  const auto evens = S("(mod 2 0)");
  const auto two = build_tower({ord("0"), ord("1")}, evens);
  CHECK_FALSE(validate_tower(two).any_fail());
  const auto one = build_tower({ord("5")}, evens);
  CHECK(one.sets.size() == 1);
  CHECK_FALSE(validate_tower(one).any_fail());
  CHECK_THROWS_AS(build_tower({ord("1"), ord("0")}, evens), DomainError);
  CHECK_THROWS_AS(build_tower({}, evens), DomainError);
  CHECK_THROWS_AS(build_tower({ord("0"), ord("1")}, S("(comp (fin 3))")), DomainError);
  TowerBuildOptions small;
  small.max_length = 3;
  CHECK_THROWS_AS(build_tower(limit_indices(4, 0), evens, small), GuardError);

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (auto [before, after] : {std::pair{20, 20}, std::pair{5, 35}, std::pair{39, 1}, std::pair{1, 1}}) {
      TowerBuildOptions o;
      o.seed = seed;
      const auto idx = limit_indices(before, after);
      const auto t = build_tower(idx, evens, o);
      CHECK(t.sets[before]->op == SetOp::diag);
      const auto r = validate_tower(t);
      for (const auto& rec : r.records) {
        INFO(rec.id << " " << to_json(rec).dump());
        CHECK(rec.status == Status::pass);
      }
      CHECK(r.find("tower-certificates")->details["not_tight"] == 0);
      // Tightness spelled out: the bound is 0 for an empty difference, else
      // one more than a member of the difference.
      for (const auto& [k, m] : t.certificates) {
        const auto diff = set_diff(t.set(k.first), t.set(k.second));
        if (m == 0) {
          CHECK(finite_members(diff).empty());
        } else {
          CHECK(member(diff, m - 1));
        }
      }
    }
  }

  // Two limits and a limit of limits.
  std::vector<Ordinal> idx{ord("0"), ord("1"), ord("w"), ord("w+1"), ord("w*2"), ord("w*2+1"), ord("w^2")};
  const auto t = build_tower(idx, S("(union (mod 3 0) (fin 1))"), {});
  CHECK_FALSE(validate_tower(t).any_fail());
  CHECK(t.sets[6]->op == SetOp::diag);
}

TEST_CASE("rho_TO is transitive on built towers") {
  const auto t = build_tower(limit_indices(12, 10), S("(mod 2 0)"), {.max_length = 64, .seed = 7});
  for (const auto& a : t.indices) {
    for (const auto& b : t.indices) {
      if (b < a) continue;
      for (const auto& c : t.indices) {
        if (c < b) continue;
        CHECK(rho_TO(t, a, c) <= std::max(rho_TO(t, a, b), rho_TO(t, b, c)));
      }
    }
  }
}

TEST_CASE("pre-gap validation") {
  const auto g = mod4();
  const auto r = validate_pregap(g);
  for (const auto& rec : r.records) {
    INFO(to_json(rec).dump());
    CHECK(rec.status == Status::pass);
  }
  CHECK(r.records.size() == 5);

  auto bad = g;
  bad.b[0] = S("(union (mod 4 2) (fin 0))");
  const auto rb = validate_pregap(bad);
  CHECK(rb.status("pregap-disjoint") == Status::fail);
  CHECK(rb.find("pregap-disjoint")->counterexample["sample"] == json::array({0}));

  auto swapped = g;
  std::swap(swapped.a[0], swapped.a[1]);
  CHECK(validate_pregap(swapped).status("pregap-a-increasing") == Status::fail);

  const auto single = load_pregap(data_path("gap_single.txt"));
  CHECK_FALSE(validate_pregap(single).any_fail());
  const auto again = parse_pregap(to_manifest(single));
  CHECK(to_manifest(again) == to_manifest(single));
}

TEST_CASE("gap_F_member examples") {
  const auto g = mod4();
  CHECK(gap_F_member(g, ord("0"), 0, ord("1")));
  CHECK_THROWS_AS(gap_F_member(g, ord("1"), 0, ord("1")), DomainError);
  const auto s = load_pregap(data_path("gap_single.txt"));
  CHECK_FALSE(gap_F_member(s, ord("0"), 2, ord("1")));
  CHECK(gap_F_member(s, ord("0"), 3, ord("1")));
}

TEST_CASE("splitter_check examples") {
  const auto g = mod4();
  auto r = splitter_check(S("(mod 4 0 1)"), g);
  CHECK(r.splits);
  REQUIRE(r.least_xi.size() == 2);
  CHECK(r.least_xi[0].second == 0);
  CHECK(r.least_xi[1].second == 0);

  r = splitter_check(S("all"), g);
  CHECK_FALSE(r.splits);
  CHECK(r.index == ord("0"));
  CHECK(r.side == "b");

  r = splitter_check(S("(mod 2 0)"), g);
  CHECK_FALSE(r.splits);
  CHECK(r.index == ord("1"));
  CHECK(r.side == "a");

  // A splitter off by finitely many points: least xi grows accordingly.
  r = splitter_check(S("(union (diff (mod 4 0 1) (fin 4)) (fin 2))"), g);
  CHECK(r.splits);
  CHECK(r.least_xi[0].second == 5);
  CHECK(r.least_xi[1].second == 5);
}

TEST_CASE("hausdorff_check") {
  const auto t = load_tower(data_path("tower_two.txt"));
  CHECK(hausdorff_check(t, 1, ord("1")) == std::vector<Ordinal>{ord("0")});
  CHECK(hausdorff_check(t, 0, ord("1")).empty());
  CHECK(hausdorff_check(t, 5, ord("0")).empty());
  const auto s = load_pregap(data_path("gap_single.txt"));
  CHECK(hausdorff_check(s, 2, ord("1")).empty());
  CHECK(hausdorff_check(s, 3, ord("1")) == std::vector<Ordinal>{ord("0")});
}

TEST_CASE("family providers agree with hausdorff_check") {
  auto t = std::make_shared<const Tower>(build_tower(limit_indices(8, 6), S("(mod 2 0)"), {.max_length = 64, .seed = 3}));
  const auto p = make_tower_provider(t, "--provider tower:t.txt");
  for (const auto& b : t->indices) {
    for (Natural n = 0; n < 12; ++n) {
      std::vector<Ordinal> via;
      for (const auto& a : t->indices) {
        if (p->member(a, n, b)) via.push_back(a);
      }
      CHECK(via == hausdorff_check(*t, n, b));
      CHECK(*p->enumerate(n, b) == via);
    }
  }
  const auto r = verify_axioms(*p, t->indices, 6, 1);
  for (const auto& rec : r.records) {
    INFO(to_json(rec).dump());
    CHECK(rec.status != Status::fail);
  }
  CHECK(r.status("G3") == Status::pass);

  auto g = std::make_shared<const PreGap>(load_pregap(data_path("gap_single.txt")));
  const auto q = make_gap_provider(g, "--provider gap:g.txt");
  for (Natural n = 0; n < 5; ++n) {
    std::vector<Ordinal> via;
    for (const auto& a : g->indices) {
      if (q->member(a, n, ord("1"))) via.push_back(a);
    }
    CHECK(via == hausdorff_check(*g, n, ord("1")));
  }
  CHECK_FALSE(q->witness_g3(0, ord("0"), ord("1")).has_value());
}
