#include "ordlab/matrix.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <set>

#include "ordlab/error.hpp"

namespace ordlab {

json ordinals_to_json(const std::vector<Ordinal>& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

namespace {

class FunctionMatrix final : public MatrixProvider {
 public:
  FunctionMatrix(PairFunction r, FunctionMatrixOptions o) : r_(std::move(r)), o_(std::move(o)) {}

  bool in_index_set(const Ordinal& alpha) const override { return !o_.index_set || o_.index_set(alpha); }

  bool member(const Ordinal& gamma, Natural xi, const Ordinal& alpha) const override {
    return gamma < alpha && in_index_set(alpha) && r_(gamma, alpha) <= xi;
  }

  std::optional<std::vector<Ordinal>> enumerate(Natural xi, const Ordinal& alpha) const override {
    if (!o_.sublevel || !in_index_set(alpha)) return std::nullopt;
    auto v = o_.sublevel(xi, alpha);
    std::erase(v, alpha);
    return v;
  }

  std::optional<Natural> witness_g3(Natural xi, const Ordinal& alpha, const Ordinal& beta) const override {
    if (alpha == beta) return xi;
    return std::max(xi, r_(alpha, beta));
  }

  std::optional<Natural> witness_g4(Natural eta, const Ordinal& alpha, const Ordinal& beta) const override {
    if (!o_.subadditive) return std::nullopt;
    if (alpha == beta) return eta;
    return std::max(eta, r_(alpha, beta));
  }

  bool strong() const override { return o_.subadditive; }

  std::optional<Natural> direct_rho(const Ordinal& gamma, const Ordinal& alpha) const override {
    return r_(gamma, alpha);
  }

  std::string replay_args() const override { return o_.replay_args; }

 private:
  PairFunction r_;
  FunctionMatrixOptions o_;
};

class FlippedMatrix final : public MatrixProvider {
 public:
  FlippedMatrix(ProviderPtr base, Ordinal gamma, Natural xi, Ordinal alpha)
      : base_(std::move(base)), gamma_(std::move(gamma)), xi_(xi), alpha_(std::move(alpha)) {}

  bool in_index_set(const Ordinal& a) const override { return base_->in_index_set(a); }

  bool member(const Ordinal& g, Natural xi, const Ordinal& a) const override {
    const bool v = base_->member(g, xi, a);
    return (xi == xi_ && g == gamma_ && a == alpha_) ? !v : v;
  }

  std::optional<std::vector<Ordinal>> enumerate(Natural xi, const Ordinal& a) const override {
    auto v = base_->enumerate(xi, a);
    if (!v || xi != xi_ || a != alpha_) return v;
    auto it = std::lower_bound(v->begin(), v->end(), gamma_);
    if (it != v->end() && *it == gamma_) {
      v->erase(it);
    } else {
      v->insert(it, gamma_);
    }
    return v;
  }

  std::optional<Natural> witness_g3(Natural xi, const Ordinal& a, const Ordinal& b) const override {
    return base_->witness_g3(xi, a, b);
  }
  std::optional<Natural> witness_g4(Natural eta, const Ordinal& a, const Ordinal& b) const override {
    return base_->witness_g4(eta, a, b);
  }
  bool strong() const override { return base_->strong(); }
  std::optional<Natural> direct_rho(const Ordinal& g, const Ordinal& a) const override {
    return base_->direct_rho(g, a);
  }

  std::string replay_args() const override {
    return base_->replay_args() + " --flip " + shell_quote(to_string(gamma_) + "," + std::to_string(xi_) + "," +
                                                           to_string(alpha_));
  }

 private:
  ProviderPtr base_;
  Ordinal gamma_;
  Natural xi_;
  Ordinal alpha_;
};

std::string num(Natural n) { return std::to_string(n); }
std::string ordarg(const Ordinal& a) { return shell_quote(to_string(a)); }

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

ProviderPtr from_function(PairFunction r, FunctionMatrixOptions options) {
  return std::make_shared<FunctionMatrix>(std::move(r), std::move(options));
}

ProviderPtr make_walk_provider(WalkFn fn) {
  if (fn != WalkFn::rho && fn != WalkFn::rho1) {
    throw Unsupported("walk provider needs rho or rho1, got " + std::string(to_string(fn)));
  }
  struct Shared {
    std::mutex mu;
    WalkContext ctx;
  };
  auto shared = std::make_shared<Shared>();
  FunctionMatrixOptions o;
  o.replay_args = "--provider " + std::string(to_string(fn));
  o.subadditive = fn == WalkFn::rho;
  o.sublevel = [shared, fn](Natural xi, const Ordinal& alpha) {
    std::lock_guard lock(shared->mu);
    return shared->ctx.sublevel(fn, alpha, xi);
  };
  return from_function(
      [shared, fn](const Ordinal& a, const Ordinal& b) {
        std::lock_guard lock(shared->mu);
        return shared->ctx.eval(fn, a, b);
      },
      std::move(o));
}

ProviderPtr make_flipped(ProviderPtr base, Ordinal gamma, Natural xi, Ordinal alpha) {
  return std::make_shared<FlippedMatrix>(std::move(base), std::move(gamma), xi, std::move(alpha));
}

Natural rho_F(const MatrixProvider& p, const Ordinal& alpha, const Ordinal& beta, Natural search_bound) {
  if (!(alpha < beta)) throw DomainError("rho_F requires alpha < beta");
  if (!p.in_index_set(beta)) throw DomainError("rho_F: " + to_string(beta) + " is not in the index set");
  if (auto r = p.direct_rho(alpha, beta)) return *r;
  for (Natural xi = 0; xi <= search_bound; ++xi) {
    if (p.member(alpha, xi, beta)) return xi;
  }
  throw NotFoundWithinBound("no xi <= " + std::to_string(search_bound) + " puts " + to_string(alpha) + " in F_xi(" +
                            to_string(beta) + ")");
}

std::optional<json> check_g1(const MatrixProvider& p, const Ordinal& gamma, const Ordinal& alpha, Natural xi_max,
                             Natural search_bound) {
  if (gamma >= alpha) {
    for (Natural xi = 0; xi <= xi_max; ++xi) {
      if (p.member(gamma, xi, alpha)) {
        return json{{"axiom", "G1"}, {"gamma", to_string(gamma)}, {"alpha", to_string(alpha)}, {"xi", xi},
                    {"reason", "member of F_xi(alpha) but not below alpha"}};
      }
    }
    return std::nullopt;
  }
  // With a direct function r, F_xi(alpha) must be exactly {gamma : r <= xi},
  // so the least covering xi is r itself.
  const std::optional<Natural> r = p.direct_rho(gamma, alpha);
  const Natural bound = r ? *r : search_bound;
  for (Natural xi = 0; xi <= bound; ++xi) {
    if (p.member(gamma, xi, alpha)) {
      if (r && xi != *r) {
        return json{{"axiom", "G1"}, {"gamma", to_string(gamma)}, {"alpha", to_string(alpha)}, {"least_xi", xi},
                    {"r", *r}, {"reason", "least covering xi differs from r(gamma, alpha)"}};
      }
      return std::nullopt;
    }
  }
  json cex{{"axiom", "G1"}, {"gamma", to_string(gamma)}, {"alpha", to_string(alpha)}, {"bound", bound}};
  cex["reason"] = r ? "not in F_r(alpha) for r = r(gamma, alpha)" : "no xi within the search bound covers gamma";
  return cex;
}

std::optional<json> check_g2(const MatrixProvider& p, const Ordinal& gamma, Natural xi, const Ordinal& alpha) {
  if (p.member(gamma, xi, alpha) && !p.member(gamma, xi + 1, alpha)) {
    return json{{"axiom", "G2"}, {"gamma", to_string(gamma)}, {"xi", xi}, {"eta", xi + 1}, {"alpha", to_string(alpha)}};
  }
  return std::nullopt;
}

std::optional<json> check_g3(const MatrixProvider& p, const Ordinal& gamma, Natural xi, const Ordinal& alpha,
                             const Ordinal& beta) {
  if (alpha > beta) throw DomainError("G3 check requires alpha <= beta");
  const auto eta = p.witness_g3(xi, alpha, beta);
  if (!eta) throw Unsupported("provider has no (G3) witness");
  if (p.member(gamma, xi, alpha) && !p.member(gamma, *eta, beta)) {
    return json{{"axiom", "G3"}, {"gamma", to_string(gamma)}, {"xi", xi}, {"alpha", to_string(alpha)},
                {"beta", to_string(beta)}, {"eta", *eta}};
  }
  return std::nullopt;
}

std::optional<json> check_g4(const MatrixProvider& p, const Ordinal& gamma, Natural eta, const Ordinal& alpha,
                             const Ordinal& beta) {
  if (alpha > beta) throw DomainError("G4 check requires alpha <= beta");
  const auto xi = p.witness_g4(eta, alpha, beta);
  if (!xi) throw Unsupported("provider has no (G4) witness");
  if (gamma < alpha && p.member(gamma, eta, beta) && !p.member(gamma, *xi, alpha)) {
    return json{{"axiom", "G4"}, {"gamma", to_string(gamma)}, {"eta", eta}, {"alpha", to_string(alpha)},
                {"beta", to_string(beta)}, {"xi", *xi}};
  }
  return std::nullopt;
}

std::optional<json> check_directed(const MatrixProvider& p, const Ordinal& gamma, Natural xi, const Ordinal& alpha,
                                   Natural eta, const Ordinal& beta) {
  if (alpha > beta) throw DomainError("directedness check requires alpha <= beta");
  const auto xi0 = p.witness_g3(xi, alpha, beta);
  if (!xi0) throw Unsupported("provider has no (G3) witness");
  const Natural zeta = std::max(eta, *xi0);
  const bool in_a = p.member(gamma, xi, alpha);
  const bool in_b = p.member(gamma, eta, beta);
  if ((in_a || in_b) && !p.member(gamma, zeta, beta)) {
    return json{{"axiom", "directed"}, {"gamma", to_string(gamma)}, {"xi", xi}, {"alpha", to_string(alpha)},
                {"eta", eta}, {"beta", to_string(beta)}, {"zeta", zeta}};
  }
  return std::nullopt;
}

std::optional<json> check_enumerate(const MatrixProvider& p, Natural xi, const Ordinal& alpha) {
  const auto listed = p.enumerate(xi, alpha);
  if (!listed) throw Unsupported("provider cannot enumerate F_xi(alpha)");
  // Every listed element is a member and lies below alpha.
  for (const auto& g : *listed) {
    if (!p.member(g, xi, alpha)) {
      return json{{"axiom", "enumerate"}, {"xi", xi}, {"alpha", to_string(alpha)}, {"gamma", to_string(g)},
                  {"reason", "listed but not a member"}};
    }
  }
  // Below w^2 a predecessor w*j + m of alpha with m > xi walks through
  // w*(j+1), whose C-sequence puts m elements below it, so f > xi. Scanning
  // m <= xi + n + 1 in every block therefore finds every member.
  if (alpha >= Ordinal::omega_power(Ordinal::finite(2))) return std::nullopt;
  const std::set<Ordinal> seen(listed->begin(), listed->end());
  const Natural blocks = alpha.is_finite() ? 0 : alpha.terms().front().coefficient;
  const Natural window = xi + alpha.finite_part() + 1;
  for (Natural j = 0; j <= blocks; ++j) {
    const Ordinal block = j == 0 ? Ordinal{} : Ordinal::omega_power(Ordinal::finite(1), j);
    for (Natural m = 0; m <= window; ++m) {
      const Ordinal g = add(block, Ordinal::finite(m));
      if (g >= alpha) break;
      if (p.member(g, xi, alpha) && !seen.contains(g)) {
        return json{{"axiom", "enumerate"}, {"xi", xi}, {"alpha", to_string(alpha)}, {"gamma", to_string(g)},
                    {"reason", "member missing from the listing"}};
      }
    }
  }
  return std::nullopt;
}

AxiomReport verify_axioms(const MatrixProvider& p, const std::vector<Ordinal>& universe_in, Natural xi_max,
                          std::uint64_t seed, const MatrixVerifyOptions& options) {
  std::vector<Ordinal> universe = universe_in;
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());
  std::vector<Ordinal> index;
  for (const auto& a : universe) {
    if (p.in_index_set(a)) index.push_back(a);
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < index.size(); ++i) {
    for (std::size_t j = i; j < index.size(); ++j) pairs.emplace_back(i, j);
  }
  const bool sampled = pairs.size() > options.max_pairs;
  if (sampled) {
    std::mt19937_64 rng(seed);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    pairs.resize(options.max_pairs);
    std::sort(pairs.begin(), pairs.end());
  }

  const std::string prefix = "ordlab matrix check " + p.replay_args();
  AxiomReport report;
  report.seed = seed;

  {
    auto start = Clock::now();
    CheckTally t("G1", "G1");
    for (const auto& a : index) {
      for (const auto& g : universe) {
        if (auto cex = check_g1(p, g, a, xi_max, options.search_bound)) {
          t.violation(*cex, prefix + " --axiom G1 --gamma " + ordarg(g) + " --alpha " + ordarg(a) + " --xi-max " +
                                num(xi_max) + " --search-bound " + num(options.search_bound));
        } else {
          t.ok();
        }
      }
    }
    auto rec = t.finish();
    rec.millis = elapsed_ms(start);
    report.add(std::move(rec));
  }

  {
    auto start = Clock::now();
    CheckTally t("G2", "G2");
    for (const auto& a : index) {
      for (const auto& g : universe) {
        if (g >= a) continue;
        for (Natural xi = 0; xi < xi_max; ++xi) {
          if (auto cex = check_g2(p, g, xi, a)) {
            t.violation(*cex, prefix + " --axiom G2 --gamma " + ordarg(g) + " --xi " + num(xi) + " --alpha " + ordarg(a));
          } else {
            t.ok();
          }
        }
      }
    }
    auto rec = t.finish();
    rec.millis = elapsed_ms(start);
    report.add(std::move(rec));
  }

  auto witness_suite = [&](const char* id, const char* anchor, bool available, const char* missing, auto&& body) {
    auto start = Clock::now();
    CheckTally t(id, anchor);
    if (!available) {
      t.skip(missing);
    } else {
      body(t);
      if (sampled) t.details()["sampled_pairs"] = pairs.size();
    }
    auto rec = t.finish();
    rec.millis = elapsed_ms(start);
    report.add(std::move(rec));
  };

  const bool have_g3 = index.empty() || p.witness_g3(0, index.front(), index.front()).has_value();
  const bool have_g4 = p.strong() && (index.empty() || p.witness_g4(0, index.front(), index.front()).has_value());

  witness_suite("G3", "transitive-witness", have_g3, "provider has no (G3) witness", [&](CheckTally& t) {
    for (auto [i, j] : pairs) {
      const Ordinal& a = index[i];
      const Ordinal& b = index[j];
      for (Natural xi = 0; xi <= xi_max; ++xi) {
        for (const auto& g : universe) {
          if (g >= a) break;
          if (auto cex = check_g3(p, g, xi, a, b)) {
            t.violation(*cex, prefix + " --axiom G3 --gamma " + ordarg(g) + " --xi " + num(xi) + " --alpha " +
                                  ordarg(a) + " --beta " + ordarg(b));
          } else {
            t.ok();
          }
        }
      }
    }
  });

  witness_suite("G4", "subadditive-witness", have_g4,
                p.strong() ? "provider has no (G4) witness" : "provider does not claim (G4)", [&](CheckTally& t) {
                  for (auto [i, j] : pairs) {
                    const Ordinal& a = index[i];
                    const Ordinal& b = index[j];
                    for (Natural eta = 0; eta <= xi_max; ++eta) {
                      for (const auto& g : universe) {
                        if (g >= a) break;
                        if (auto cex = check_g4(p, g, eta, a, b)) {
                          t.violation(*cex, prefix + " --axiom G4 --gamma " + ordarg(g) + " --eta " + num(eta) +
                                                " --alpha " + ordarg(a) + " --beta " + ordarg(b));
                        } else {
                          t.ok();
                        }
                      }
                    }
                  }
                });

  witness_suite("directed", "directed", have_g3, "provider has no (G3) witness", [&](CheckTally& t) {
    for (auto [i, j] : pairs) {
      const Ordinal& a = index[i];
      const Ordinal& b = index[j];
      for (Natural xi = 0; xi <= xi_max; ++xi) {
        for (Natural eta = 0; eta <= xi_max; ++eta) {
          for (const auto& g : universe) {
            if (g >= b) break;
            if (auto cex = check_directed(p, g, xi, a, eta, b)) {
              t.violation(*cex, prefix + " --axiom directed --gamma " + ordarg(g) + " --xi " + num(xi) + " --alpha " +
                                    ordarg(a) + " --eta " + num(eta) + " --beta " + ordarg(b));
            } else {
              t.ok();
            }
          }
        }
      }
    }
  });

  {
    auto start = Clock::now();
    CheckTally t("enumerate", "sublevel-enumeration");
    bool any = false;
    for (const auto& a : index) {
      if (a >= options.enumerate_below) continue;
      for (Natural xi = 0; xi <= xi_max; ++xi) {
        if (!p.enumerate(xi, a)) continue;
        any = true;
        if (auto cex = check_enumerate(p, xi, a)) {
          t.violation(*cex, prefix + " --axiom enumerate --xi " + num(xi) + " --alpha " + ordarg(a));
        } else {
          t.ok();
        }
      }
    }
    if (!any) t.skip("provider cannot enumerate F_xi(alpha) on this universe");
    auto rec = t.finish();
    rec.millis = elapsed_ms(start);
    report.add(std::move(rec));
  }

  for (auto& r : report.records) {
    r.details["universe_size"] = universe.size();
    r.details["index_size"] = index.size();
    r.details["xi_max"] = xi_max;
  }
  report.canonicalize();
  return report;
}

std::optional<UnboundedWitness> unbounded_search(const PairFunction& f, const std::vector<std::vector<Ordinal>>& family,
                                                 Natural xi) {
  std::set<Ordinal> seen;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const std::set<Ordinal> member(family[i].begin(), family[i].end());
    for (const auto& x : member) {
      if (!seen.insert(x).second) {
        throw DomainError("family members overlap at " + to_string(x) + " (set " + std::to_string(i) + ")");
      }
    }
  }
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size(); ++j) {
      bool all = true;
      for (const auto& x : family[i]) {
        for (const auto& y : family[j]) {
          const Ordinal& lo = std::min(x, y);
          const Ordinal& hi = std::max(x, y);
          if (f(lo, hi) <= xi) {
            all = false;
            break;
          }
        }
        if (!all) break;
      }
      if (all) return UnboundedWitness{i, j};
    }
  }
  return std::nullopt;
}

Natural condition_H_count(WalkContext& ctx, WalkFn fn, const Ordinal& beta, Natural xi) {
  if (fn != WalkFn::rho && fn != WalkFn::rho1) {
    throw Unsupported("condition (H) count needs rho or rho1; " + std::string(to_string(fn)) +
                      " has infinite sublevel sets");
  }
  return ctx.sublevel(fn, beta, xi).size() - 1;
}

}  // namespace ordlab
