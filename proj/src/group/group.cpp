#include "ordlab/group.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <set>

#include "ordlab/error.hpp"

namespace ordlab {

GroupElement::GroupElement(std::vector<Ordinal> elems) : elems_(std::move(elems)) {
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
}

bool GroupElement::contains(const Ordinal& x) const { return std::binary_search(elems_.begin(), elems_.end(), x); }

GroupElement sym_diff(const GroupElement& a, const GroupElement& b) {
  std::vector<Ordinal> out;
  std::set_symmetric_difference(a.elems().begin(), a.elems().end(), b.elems().begin(), b.elems().end(),
                                std::back_inserter(out));
  return GroupElement(std::move(out));
}

std::string to_string(const GroupElement& a) {
  std::string s = "{";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ",";
    s += to_string(a.elems()[i]);
  }
  return s + "}";
}

GroupElement parse_group_element(std::string_view text) {
  std::string s(text);
  auto first = s.find_first_not_of(" \t\r\n");
  auto last = s.find_last_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  s = s.substr(first, last - first + 1);
  if (s.front() == '{') {
    if (s.back() != '}') throw ParseError("unbalanced braces in set '" + std::string(text) + "'");
    s = s.substr(1, s.size() - 2);
  }
  std::vector<Ordinal> elems;
  if (s.find_first_not_of(" \t") == std::string::npos) return {};
  std::size_t start = 0;
  for (;;) {
    const auto comma = s.find(',', start);
    elems.push_back(parse_ordinal(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return GroupElement(std::move(elems));
}

std::string describe(const Neighborhood& u) {
  if (const auto* b = std::get_if<BasicNbhd>(&u)) return "U_" + std::to_string(b->xi) + "(" + to_string(b->alpha) + ")";
  const auto& s = std::get<SubbaseNbhd>(u);
  std::string out = "cap{";
  for (std::size_t i = 0; i < s.K.size(); ++i) {
    if (i) out += ";";
    out += std::to_string(s.K[i].first) + "," + to_string(s.K[i].second);
  }
  return out + "}";
}

namespace {

bool avoids(const GroupElement& a, const MatrixProvider& p, Natural xi, const Ordinal& alpha) {
  return std::none_of(a.elems().begin(), a.elems().end(), [&](const Ordinal& g) { return p.member(g, xi, alpha); });
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

const ProviderPtr& provider_ptr(const Neighborhood& u) {
  if (const auto* b = std::get_if<BasicNbhd>(&u)) return b->provider;
  return std::get<SubbaseNbhd>(u).provider;
}

const MatrixProvider& provider_of(const Neighborhood& u) { return *provider_ptr(u); }

json element_json(const GroupElement& a) { return to_string(a); }

}  // namespace

std::optional<Neighborhood> meet_witness(const Neighborhood& u, const Neighborhood& v) {
  const auto* bu = std::get_if<BasicNbhd>(&u);
  const auto* bv = std::get_if<BasicNbhd>(&v);
  if (bu && bv) {
    const BasicNbhd& lo = bu->alpha <= bv->alpha ? *bu : *bv;
    const BasicNbhd& hi = bu->alpha <= bv->alpha ? *bv : *bu;
    const auto xi0 = lo.provider->witness_g3(lo.xi, lo.alpha, hi.alpha);
    if (!xi0) return std::nullopt;
    return BasicNbhd{std::max(hi.xi, *xi0), hi.alpha, hi.provider};
  }
  SubbaseNbhd w;
  w.provider = bu ? bu->provider : std::get<SubbaseNbhd>(u).provider;
  for (const Neighborhood* n : {&u, &v}) {
    if (const auto* b = std::get_if<BasicNbhd>(n)) {
      w.K.emplace_back(b->xi, b->alpha);
    } else {
      const auto& k = std::get<SubbaseNbhd>(*n).K;
      w.K.insert(w.K.end(), k.begin(), k.end());
    }
  }
  std::sort(w.K.begin(), w.K.end());
  w.K.erase(std::unique(w.K.begin(), w.K.end()), w.K.end());
  return w;
}

std::string nbhd_arg(const Neighborhood& u) {
  if (const auto* b = std::get_if<BasicNbhd>(&u)) return std::to_string(b->xi) + "," + to_string(b->alpha);
  std::string out;
  for (const auto& [xi, beta] : std::get<SubbaseNbhd>(u).K) {
    if (!out.empty()) out += ";";
    out += std::to_string(xi) + "," + to_string(beta);
  }
  return out;
}

Neighborhood parse_nbhd(std::string_view text, ProviderPtr provider) {
  SubbaseNbhd s;
  s.provider = provider;
  std::string rest(text);
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const std::string part = rest.substr(0, semi);
    rest = semi == std::string::npos ? "" : rest.substr(semi + 1);
    const auto comma = part.find(',');
    if (comma == std::string::npos) throw ParseError("neighborhood '" + std::string(text) + "' needs xi,alpha pairs");
    Natural xi = 0;
    try {
      std::size_t used = 0;
      xi = std::stoull(part.substr(0, comma), &used);
      if (used != comma) throw ParseError("");
    } catch (const std::exception&) {
      throw ParseError("bad xi in neighborhood '" + std::string(text) + "'");
    }
    s.K.emplace_back(xi, parse_ordinal(part.substr(comma + 1)));
  }
  if (s.K.empty()) throw ParseError("empty neighborhood");
  if (s.K.size() == 1) return BasicNbhd{s.K.front().first, s.K.front().second, std::move(provider)};
  return s;
}

bool in_neighborhood(const GroupElement& a, const Neighborhood& u) {
  if (const auto* b = std::get_if<BasicNbhd>(&u)) return avoids(a, *b->provider, b->xi, b->alpha);
  const auto& s = std::get<SubbaseNbhd>(u);
  return std::all_of(s.K.begin(), s.K.end(), [&](const auto& k) { return avoids(a, *s.provider, k.first, k.second); });
}

AxiomReport verify_group_axioms(const std::vector<Neighborhood>& base, const std::vector<GroupElement>& elements,
                                std::uint64_t seed, const GroupVerifyOptions& options) {
  AxiomReport report;
  report.seed = seed;
  std::mt19937_64 rng(seed);

  const std::string prefix =
      !options.replay_prefix.empty()
          ? options.replay_prefix
          : (base.empty() ? std::string("ordlab group check") : "ordlab group check " + provider_of(base.front()).replay_args());
  auto replay = [&](const std::string& condition, std::initializer_list<std::string> args) {
    std::string cmd = prefix + " --condition " + condition;
    bool flag = true;
    for (const auto& a : args) {
      cmd += " " + (flag ? a : shell_quote(a));
      flag = !flag;
    }
    return cmd;
  };

  std::vector<std::pair<std::size_t, std::size_t>> epairs;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    for (std::size_t j = i; j < elements.size(); ++j) epairs.emplace_back(i, j);
  }
  if (epairs.size() > options.max_element_pairs) {
    std::shuffle(epairs.begin(), epairs.end(), rng);
    epairs.resize(options.max_element_pairs);
    std::sort(epairs.begin(), epairs.end());
  }

  auto finish = [&](CheckTally& t, Clock::time_point start) {
    auto rec = t.finish();
    rec.millis = elapsed_ms(start);
    rec.details["elements"] = elements.size();
    rec.details["neighborhoods"] = base.size();
    report.add(std::move(rec));
  };

  // (1) V^2 ⊆ U and (3) Vx ⊆ U for x in U, both with V = U: a△b ⊆ a∪b.
  for (const char* id : {"group-1", "group-3"}) {
    auto start = Clock::now();
    CheckTally t(id, id == std::string("group-1") ? "square-root-nbhd" : "translate-nbhd");
    for (const auto& u : base) {
      std::vector<char> inside(elements.size());
      for (std::size_t i = 0; i < elements.size(); ++i) inside[i] = in_neighborhood(elements[i], u);
      for (auto [i, j] : epairs) {
        if (!inside[i] || !inside[j]) continue;
        const GroupElement d = sym_diff(elements[i], elements[j]);
        const bool subset = std::all_of(d.elems().begin(), d.elems().end(), [&](const Ordinal& x) {
          return elements[i].contains(x) || elements[j].contains(x);
        });
        if (!subset || !in_neighborhood(d, u)) {
          t.violation({{"nbhd", describe(u)}, {"a", element_json(elements[i])}, {"b", element_json(elements[j])},
                       {"sym_diff", element_json(d)}},
                      replay(std::string(id).substr(6), {"--nbhd", nbhd_arg(u), "--a", to_string(elements[i]), "--b",
                                      to_string(elements[j])}));
        } else {
          t.ok();
        }
      }
    }
    finish(t, start);
  }

  {
    auto start = Clock::now();
    CheckTally t("group-2", "inverse-nbhd");
    for (const auto& a : elements) {
      if (!sym_diff(a, a).empty()) {
        t.violation({{"a", element_json(a)}, {"reason", "a △ a is not empty"}}, replay("2", {"--a", to_string(a)}));
      } else {
        t.ok();
      }
    }
    finish(t, start);
  }

  {
    auto start = Clock::now();
    CheckTally t("group-4", "conjugate-nbhd");
    for (auto [i, j] : epairs) {
      const GroupElement& x = elements[i];
      const GroupElement& a = elements[j];
      if (sym_diff(x, a) != sym_diff(a, x) || sym_diff(sym_diff(x, a), x) != a) {
        t.violation({{"x", element_json(x)}, {"a", element_json(a)}},
                    replay("4", {"--a", to_string(x), "--b", to_string(a)}));
      } else {
        t.ok();
      }
    }
    finish(t, start);
  }

  {
    auto start = Clock::now();
    CheckTally t("group-5", "meet-witness");
    std::vector<std::pair<std::size_t, std::size_t>> npairs;
    for (std::size_t i = 0; i < base.size(); ++i) {
      for (std::size_t j = i; j < base.size(); ++j) npairs.emplace_back(i, j);
    }
    if (npairs.size() > options.max_nbhd_pairs) {
      std::shuffle(npairs.begin(), npairs.end(), rng);
      npairs.resize(options.max_nbhd_pairs);
      std::sort(npairs.begin(), npairs.end());
      t.details()["sampled_nbhd_pairs"] = npairs.size();
    }
    // Singletons expose every point of the F-sets involved.
    std::set<Ordinal> points;
    for (const auto& a : elements) points.insert(a.elems().begin(), a.elems().end());
    std::vector<GroupElement> probes(elements.begin(), elements.end());
    for (const auto& x : points) probes.emplace_back(std::vector<Ordinal>{x});
    bool skipped = false;
    for (auto [i, j] : npairs) {
      const auto w = meet_witness(base[i], base[j]);
      if (!w) {
        skipped = true;
        continue;
      }
      for (const auto& a : probes) {
        if (in_neighborhood(a, *w) && !(in_neighborhood(a, base[i]) && in_neighborhood(a, base[j]))) {
          t.violation({{"U", describe(base[i])}, {"V", describe(base[j])}, {"W", describe(*w)},
                       {"a", element_json(a)}},
                      replay("5", {"--nbhd", nbhd_arg(base[i]), "--nbhd2", nbhd_arg(base[j]), "--a", to_string(a)}));
        } else {
          t.ok();
        }
      }
    }
    if (skipped) t.skip("some neighborhood pairs lack a (G3) witness");
    finish(t, start);
  }

  auto index_above = [&](const MatrixProvider& p, const Ordinal& x) -> std::optional<Ordinal> {
    if (options.index_above) return options.index_above(x);
    Ordinal next = add(x, Ordinal::finite(1));
    if (p.in_index_set(next)) return next;
    return std::nullopt;
  };

  {
    auto start = Clock::now();
    CheckTally t("group-6", "identity-intersection");
    if (base.empty()) {
      t.skip("no neighborhoods");
    } else {
      const MatrixProvider& p = provider_of(base.front());
      std::size_t nonempty = 0;
      for (const auto& a : elements) {
        if (a.empty()) continue;
        ++nonempty;
        const auto alpha = index_above(p, a.elems().back());
        if (!alpha) {
          t.undecided("no index above " + to_string(a));
          continue;
        }
        bool separated = false;
        json attempt;
        for (const auto& x : a.elems()) {
          try {
            const Natural xi = rho_F(p, x, *alpha, options.search_bound);
            const Neighborhood u = BasicNbhd{xi, *alpha, provider_ptr(base.front())};
            attempt = {{"x", to_string(x)}, {"xi", xi}, {"alpha", to_string(*alpha)}};
            if (!in_neighborhood(a, u)) {
              separated = true;
              break;
            }
          } catch (const NotFoundWithinBound&) {
          }
        }
        if (separated) {
          t.ok();
        } else {
          t.violation({{"a", element_json(a)}, {"last_attempt", attempt}}, replay("6", {"--a", to_string(a)}));
        }
      }
      if (nonempty == 0) t.skip("no nonempty elements");
    }
    finish(t, start);
  }

  {
    // Finite fragment of the character argument: beta' above every alpha of
    // the base lies in all of them, while U_xi0(beta) excludes {beta'}.
    auto start = Clock::now();
    CheckTally t("character", "fresh-nbhd");
    std::vector<const BasicNbhd*> basics;
    for (const auto& u : base) {
      if (const auto* b = std::get_if<BasicNbhd>(&u)) basics.push_back(b);
    }
    if (basics.empty()) {
      t.skip("no basic neighborhoods");
    } else {
      const MatrixProvider& p = *basics.front()->provider;
      Ordinal top;
      for (const auto* b : basics) top = std::max(top, b->alpha);
      const auto beta_prime = index_above(p, top);
      const auto beta = beta_prime ? index_above(p, *beta_prime) : std::nullopt;
      if (!beta) {
        t.skip("no fresh indices above the base");
      } else {
        const GroupElement fresh(std::vector<Ordinal>{*beta_prime});
        const Natural xi0 = rho_F(p, *beta_prime, *beta, options.search_bound);
        const Neighborhood target = BasicNbhd{xi0, *beta, basics.front()->provider};
        if (in_neighborhood(fresh, target)) {
          t.violation({{"beta_prime", to_string(*beta_prime)}, {"beta", to_string(*beta)}, {"xi0", xi0},
                       {"reason", "fresh point not excluded by U_xi0(beta)"}},
                      replay("6", {"--a", to_string(fresh)}));
        } else {
          t.ok();
        }
        for (const auto* b : basics) {
          if (!in_neighborhood(fresh, *b)) {
            t.violation({{"beta_prime", to_string(*beta_prime)}, {"nbhd", describe(*b)},
                         {"reason", "fresh point excluded by a base neighborhood"}},
                        replay("member", {"--nbhd", nbhd_arg(*b), "--a", to_string(fresh)}));
          } else {
            t.ok();
          }
        }
        t.details()["beta_prime"] = to_string(*beta_prime);
        t.details()["beta"] = to_string(*beta);
      }
    }
    finish(t, start);
  }

  report.canonicalize();
  return report;
}

Convergence converges(const std::vector<GroupElement>& seq, const Neighborhood& u) {
  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!in_neighborhood(seq[i], u)) outside.push_back(i);
  }
  if (outside.empty()) return TailIndex{0};
  if (outside.back() + 1 < seq.size()) return TailIndex{outside.back() + 1};
  return Counterexample{std::move(outside)};
}

Natural restriction_cover(const Ordinal& delta, Natural xi, const Ordinal& alpha, const MatrixProvider& p,
                          const std::vector<Ordinal>& sample, const Ordinal& enumerate_below) {
  if (!p.in_index_set(delta) || !p.in_index_set(alpha)) throw DomainError("restriction_cover needs index-set members");
  std::optional<Natural> eta;
  if (alpha <= delta) {
    eta = p.witness_g3(xi, alpha, delta);
    if (!eta) throw Unsupported("provider has no (G3) witness");
  } else {
    if (!p.strong()) throw Unsupported("restriction below alpha needs a strong matrix");
    eta = p.witness_g4(xi, delta, alpha);
    if (!eta) throw Unsupported("provider has no (G4) witness");
  }

  std::vector<Ordinal> candidates = sample;
  if (alpha < enumerate_below) {
    if (auto listed = p.enumerate(xi, alpha)) candidates.insert(candidates.end(), listed->begin(), listed->end());
  }
  for (const auto& g : candidates) {
    if (g < delta && p.member(g, xi, alpha) && !p.member(g, *eta, delta)) {
      throw Error("restriction_cover self-check failed: " + to_string(g) + " in F_" + std::to_string(xi) + "(" +
                  to_string(alpha) + ") ∩ " + to_string(delta) + " but not in F_" + std::to_string(*eta) + "(" +
                  to_string(delta) + ")");
    }
  }
  return *eta;
}

}  // namespace ordlab
