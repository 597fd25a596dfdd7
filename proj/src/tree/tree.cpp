#include "ordlab/tree.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <sstream>

#include "ordlab/error.hpp"

namespace ordlab {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

Natural parse_natural(const std::string& s, const char* what) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError(std::string("expected a natural for ") + what + ", got '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw GuardError(std::string(what) + " '" + s + "' overflows");
  }
}

}  // namespace

void ExplicitTree::add_node(const Ordinal& id, const Ordinal& level, Natural offset, std::optional<Ordinal> parent) {
  if (mul_omega_left(level) != level) {
    throw DomainError("level " + to_string(level) + " is not an index level (w*alpha != alpha)");
  }
  if (add(level, Ordinal::finite(offset)) != id) {
    throw DomainError("node " + to_string(id) + " is not level + offset = " +
                      to_string(add(level, Ordinal::finite(offset))));
  }
  auto [it, fresh] = nodes_.try_emplace(id, TreeNode{id, level, offset, {}});
  if (!fresh && (it->second.level != level || it->second.offset != offset)) {
    throw DomainError("node " + to_string(id) + " declared twice with different labels");
  }
  if (parent && std::find(it->second.parents.begin(), it->second.parents.end(), *parent) == it->second.parents.end()) {
    it->second.parents.push_back(*parent);
  }
}

const TreeNode& ExplicitTree::node(const Ordinal& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw IncompleteData("node " + to_string(id) + " is not in the fragment");
  return it->second;
}

std::vector<Ordinal> ExplicitTree::levels() const {
  std::set<Ordinal> out;
  for (const auto& [id, n] : nodes_) out.insert(n.level);
  return {out.begin(), out.end()};
}

std::vector<Ordinal> ExplicitTree::level_nodes(const Ordinal& level) const {
  std::vector<Ordinal> out;
  for (const auto& [id, n] : nodes_) {
    if (n.level == level) out.push_back(id);
  }
  return out;
}

std::optional<Natural> ExplicitTree::max_offset(const Ordinal& level) const {
  std::optional<Natural> best;
  for (const auto& [id, n] : nodes_) {
    if (n.level == level) best = std::max(best.value_or(0), n.offset);
  }
  return best;
}

std::set<Ordinal> ExplicitTree::ancestors(const Ordinal& id) const {
  std::set<Ordinal> seen;
  std::vector<Ordinal> stack{id};
  while (!stack.empty()) {
    const Ordinal cur = stack.back();
    stack.pop_back();
    auto it = nodes_.find(cur);
    if (it == nodes_.end()) continue;
    for (const auto& p : it->second.parents) {
      if (seen.insert(p).second) stack.push_back(p);
    }
  }
  return seen;
}

bool ExplicitTree::precedes(const Ordinal& a, const Ordinal& b) const { return ancestors(b).contains(a); }

std::vector<TreeIssue> ExplicitTree::validate() const {
  std::vector<TreeIssue> issues;
  const auto lv = levels();
  for (const auto& [id, n] : nodes_) {
    if (n.parents.size() > 1) {
      issues.push_back({"several-parents", {{"node", to_string(id)}, {"parents", ordinals_to_json(n.parents)}}});
    }
    for (const auto& p : n.parents) {
      auto it = nodes_.find(p);
      if (it == nodes_.end()) {
        issues.push_back({"unknown-parent", {{"node", to_string(id)}, {"parent", to_string(p)}}});
        continue;
      }
      if (it->second.level >= n.level) {
        issues.push_back({"level-order", {{"node", to_string(id)}, {"parent", to_string(p)}}});
        continue;
      }
      // The parent must sit on the next stored level down.
      auto pos = std::lower_bound(lv.begin(), lv.end(), n.level);
      if (pos != lv.begin() && *std::prev(pos) != it->second.level) {
        issues.push_back({"chain-gap", {{"node", to_string(id)}, {"parent", to_string(p)},
                                        {"skipped_level", to_string(*std::prev(pos))}}});
      }
    }
    if (n.parents.empty() && n.level != lv.front()) {
      issues.push_back({"chain-gap", {{"node", to_string(id)}, {"reason", "root child above the lowest level"}}});
    }
    if (ancestors(id).contains(id)) issues.push_back({"cycle", {{"node", to_string(id)}}});
  }
  // Normality: every node has an extension on each higher stored level.
  for (const auto& [id, n] : nodes_) {
    for (const auto& l : lv) {
      if (l <= n.level) continue;
      const auto above = level_nodes(l);
      const bool extended =
          std::any_of(above.begin(), above.end(), [&](const Ordinal& x) { return ancestors(x).contains(id); });
      if (!extended) issues.push_back({"not-normal", {{"node", to_string(id)}, {"level", to_string(l)}}});
    }
  }
  return issues;
}

ExplicitTree parse_tree(std::string_view text) {
  ExplicitTree t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw ParseError("tree line " + std::to_string(lineno) + ": " + msg);
    };
    // Split into keyword/value pairs; values may contain spaces only inside
    // the ordinal grammar, which never contains the next keyword.
    auto grab = [&](const std::string& key, const std::string& next) {
      const auto k = line.find(key + " ");
      if (k == std::string::npos) fail("missing '" + key + "'");
      const auto start = k + key.size() + 1;
      const auto end = next.empty() ? std::string::npos : line.find(" " + next + " ", start);
      if (!next.empty() && end == std::string::npos) fail("missing '" + next + "'");
      return trim(line.substr(start, end == std::string::npos ? std::string::npos : end - start));
    };
    if (line.rfind("node ", 0) != 0) fail("expected 'node <ord> level <ord> offset <nat> parent <ord|root>'");
    try {
      const Ordinal id = parse_ordinal(grab("node", "level"));
      const Ordinal level = parse_ordinal(grab("level", "offset"));
      const Natural offset = parse_natural(grab("offset", "parent"), "offset");
      const std::string parent = grab("parent", "");
      std::optional<Ordinal> p;
      if (parent != "root") p = parse_ordinal(parent);
      t.add_node(id, level, offset, p);
    } catch (const ParseError& e) {
      fail(e.what());
    } catch (const DomainError& e) {
      fail(e.what());
    }
  }
  return t;
}

ExplicitTree load_tree(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tree file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_tree(ss.str());
}

namespace {

const Ordinal& require_node(const ExplicitTree& t, const Ordinal& level, Natural offset, Ordinal& scratch) {
  scratch = add(level, Ordinal::finite(offset));
  if (!t.contains(scratch)) {
    throw IncompleteData("node " + to_string(scratch) + " (level " + to_string(level) + ", offset " +
                         std::to_string(offset) + ") is not in the fragment");
  }
  return scratch;
}

void require_level(const ExplicitTree& t, const Ordinal& alpha) {
  if (!t.max_offset(alpha)) throw IncompleteData("level " + to_string(alpha) + " is not in the fragment");
}

/// Stored predecessors of `id` on `level`.
std::vector<Ordinal> level_predecessors(const ExplicitTree& t, const Ordinal& id, const Ordinal& level) {
  std::vector<Ordinal> out;
  for (const auto& a : t.ancestors(id)) {
    if (t.contains(a) && t.node(a).level == level) out.push_back(a);
  }
  return out;
}

}  // namespace

bool tree_F_member(const ExplicitTree& t, const Ordinal& gamma, Natural xi, const Ordinal& alpha) {
  require_level(t, alpha);
  if (gamma >= alpha) return false;
  // Every alpha + eta with eta <= xi must be stored, even past a hit.
  std::vector<Ordinal> tops;
  Ordinal scratch;
  for (Natural eta = 0; eta <= xi; ++eta) tops.push_back(require_node(t, alpha, eta, scratch));
  return std::any_of(tops.begin(), tops.end(), [&](const Ordinal& top) { return t.precedes(gamma, top); });
}

Natural tree_g3_witness(const ExplicitTree& t, Natural xi, const Ordinal& alpha, const Ordinal& beta) {
  if (alpha > beta) throw DomainError("(G3) witness needs alpha <= beta");
  require_level(t, alpha);
  require_level(t, beta);
  if (alpha == beta) return xi;
  Natural sup = 0;
  Ordinal scratch;
  const auto above = t.level_nodes(beta);
  for (Natural e = 0; e <= xi; ++e) {
    const Ordinal low = require_node(t, alpha, e, scratch);
    std::optional<Natural> eta;
    for (const auto& b : above) {
      if (t.precedes(low, b)) {
        eta = t.node(b).offset;
        break;
      }
    }
    if (!eta) throw IncompleteData("no stored node of level " + to_string(beta) + " extends " + to_string(low));
    sup = std::max(sup, *eta);
  }
  return sup;
}

Natural tree_g4_witness(const ExplicitTree& t, Natural eta, const Ordinal& alpha, const Ordinal& beta) {
  if (alpha > beta) throw DomainError("(G4) witness needs alpha <= beta");
  require_level(t, alpha);
  require_level(t, beta);
  if (alpha == beta) return eta;
  Natural sup = 0;
  Ordinal scratch;
  for (Natural e = 0; e <= eta; ++e) {
    const Ordinal top = require_node(t, beta, e, scratch);
    const auto preds = level_predecessors(t, top, alpha);
    if (preds.empty()) throw IncompleteData("no stored predecessor of " + to_string(top) + " on level " + to_string(alpha));
    if (preds.size() > 1) {
      throw DomainError("node " + to_string(top) + " has " + std::to_string(preds.size()) +
                        " predecessors on level " + to_string(alpha));
    }
    sup = std::max(sup, t.node(preds.front()).offset);
  }
  return sup;
}

AxiomReport verify_tree_matrix(const ExplicitTree& t, const std::vector<Ordinal>& levels_in, Natural xi_max,
                               const std::string& replay) {
  std::vector<Ordinal> levels = levels_in.empty() ? t.levels() : levels_in;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<Ordinal> nodes;
  for (const auto& [id, n] : t.nodes()) nodes.push_back(id);

  AxiomReport report;
  auto finish = [&](CheckTally& tally, Clock::time_point start) {
    auto rec = tally.finish();
    rec.millis = elapsed_ms(start);
    rec.details["nodes"] = nodes.size();
    rec.details["levels"] = levels.size();
    report.add(std::move(rec));
  };
  // Instances needing nodes the fragment lacks are undecided, never guessed.
  auto guarded = [](CheckTally& tally, auto&& body) {
    try {
      body();
    } catch (const IncompleteData& e) {
      tally.undecided(e.what());
    }
  };

  {
    auto start = Clock::now();
    CheckTally tally("tree-order", "tree-order");
    for (const auto& issue : t.validate()) {
      json cex = issue.detail;
      cex["kind"] = issue.kind;
      tally.violation(cex, replay);
    }
    if (!tally.failed()) tally.ok();
    finish(tally, start);
  }

  {
    auto start = Clock::now();
    CheckTally tally("G1", "G1");
    for (const auto& a : levels) {
      guarded(tally, [&] {
        const Natural top = *t.max_offset(a);
        for (const auto& g : nodes) {
          if (g >= a) {
            if (tree_F_member(t, g, std::min(top, xi_max), a)) {
              tally.violation({{"gamma", to_string(g)}, {"alpha", to_string(a)}, {"reason", "member not below alpha"}},
                              replay);
            } else {
              tally.ok();
            }
            continue;
          }
          // Largest xi whose nodes alpha + 0..xi are all stored.
          Natural full = 0;
          while (full < top && t.contains(add(a, Ordinal::finite(full + 1)))) ++full;
          if (tree_F_member(t, g, full, a)) {
            tally.ok();
          } else {
            tally.undecided("no stored node of level " + to_string(a) + " extends " + to_string(g));
          }
        }
      });
    }
    finish(tally, start);
  }

  {
    auto start = Clock::now();
    CheckTally tally("G2", "G2");
    for (const auto& a : levels) {
      for (const auto& g : nodes) {
        for (Natural xi = 0; xi < xi_max; ++xi) {
          guarded(tally, [&] {
            if (tree_F_member(t, g, xi, a) && !tree_F_member(t, g, xi + 1, a)) {
              tally.violation({{"gamma", to_string(g)}, {"xi", xi}, {"alpha", to_string(a)}}, replay);
            } else {
              tally.ok();
            }
          });
        }
      }
    }
    finish(tally, start);
  }

  {
    auto start = Clock::now();
    CheckTally tally("G3", "tree-sup-witness");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (std::size_t j = i; j < levels.size(); ++j) {
        const Ordinal& a = levels[i];
        const Ordinal& b = levels[j];
        for (Natural xi = 0; xi <= xi_max; ++xi) {
          guarded(tally, [&] {
            const Natural eta = tree_g3_witness(t, xi, a, b);
            for (const auto& g : nodes) {
              if (tree_F_member(t, g, xi, a) && !tree_F_member(t, g, eta, b)) {
                tally.violation({{"gamma", to_string(g)}, {"xi", xi}, {"alpha", to_string(a)}, {"beta", to_string(b)},
                                 {"eta", eta}},
                                replay);
              } else {
                tally.ok();
              }
            }
          });
        }
      }
    }
    finish(tally, start);
  }

  {
    auto start = Clock::now();
    CheckTally tally("G4", "tree-unique-predecessor");
    for (std::size_t i = 0; i < levels.size(); ++i) {
      for (std::size_t j = i; j < levels.size(); ++j) {
        const Ordinal& a = levels[i];
        const Ordinal& b = levels[j];
        for (Natural eta = 0; eta <= xi_max; ++eta) {
          guarded(tally, [&] {
            Natural xi = eta;
            if (a < b) {
              xi = 0;
              Ordinal scratch;
              for (Natural e = 0; e <= eta; ++e) {
                const Ordinal top = require_node(t, b, e, scratch);
                const auto preds = level_predecessors(t, top, a);
                if (preds.size() > 1) {
                  tally.violation({{"alpha", to_string(a)}, {"beta", to_string(b)}, {"epsilon", e},
                                   {"node", to_string(top)}, {"predecessors", ordinals_to_json(preds)},
                                   {"reason", "predecessor on level alpha is not unique"}},
                                  replay);
                  return;
                }
                if (preds.empty()) {
                  throw IncompleteData("no stored predecessor of " + to_string(top) + " on level " + to_string(a));
                }
                xi = std::max(xi, t.node(preds.front()).offset);
              }
            }
            for (const auto& g : nodes) {
              if (g >= a) continue;
              if (tree_F_member(t, g, eta, b) && !tree_F_member(t, g, xi, a)) {
                tally.violation({{"gamma", to_string(g)}, {"eta", eta}, {"alpha", to_string(a)}, {"beta", to_string(b)},
                                 {"xi", xi}},
                                replay);
              } else {
                tally.ok();
              }
            }
          });
        }
      }
    }
    finish(tally, start);
  }

  report.canonicalize();
  return report;
}

ChainReport branch_check(const ExplicitTree& t) {
  ChainReport r;
  std::set<Ordinal> has_child;
  for (const auto& [id, n] : t.nodes()) has_child.insert(n.parents.begin(), n.parents.end());
  std::vector<Ordinal> path;
  std::function<void(const Ordinal&)> climb = [&](const Ordinal& id) {
    path.push_back(id);
    const auto& parents = t.contains(id) ? t.node(id).parents : std::vector<Ordinal>{};
    bool any = false;
    for (const auto& p : parents) {
      if (!t.contains(p) || std::find(path.begin(), path.end(), p) != path.end()) continue;
      any = true;
      climb(p);
    }
    if (!any) r.chains.emplace_back(path.rbegin(), path.rend());
    path.pop_back();
  };
  for (const auto& [id, n] : t.nodes()) {
    if (!has_child.contains(id)) climb(id);
  }
  std::sort(r.chains.begin(), r.chains.end());
  for (const auto& c : r.chains) r.longest = std::max(r.longest, c.size());
  return r;
}

AntichainReport antichain_check(const ExplicitTree& t) {
  AntichainReport r;
  std::vector<Ordinal> ids;
  for (const auto& [id, n] : t.nodes()) {
    ids.push_back(id);
    ++r.level_sizes[n.level];
  }
  const std::size_t n = ids.size();
  if (n == 0) return r;
  // below[u] lists v with u ≺ v.
  std::vector<std::vector<std::size_t>> below(n);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& a : t.ancestors(ids[v])) {
      auto it = std::lower_bound(ids.begin(), ids.end(), a);
      if (it != ids.end() && *it == a && static_cast<std::size_t>(it - ids.begin()) != v) {
        below[static_cast<std::size_t>(it - ids.begin())].push_back(v);
      }
    }
  }
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> match_right(n, none), match_left(n, none);
  std::vector<char> visited;
  std::function<bool(std::size_t)> augment = [&](std::size_t u) {
    for (std::size_t v : below[u]) {
      if (visited[v]) continue;
      visited[v] = 1;
      if (match_right[v] == none || augment(match_right[v])) {
        match_right[v] = u;
        match_left[u] = v;
        return true;
      }
    }
    return false;
  };
  std::size_t matching = 0;
  for (std::size_t u = 0; u < n; ++u) {
    visited.assign(n, 0);
    if (augment(u)) ++matching;
  }
  r.max_antichain = n - matching;
  // König: Z = vertices reachable from free left vertices by alternating paths.
  std::vector<char> zl(n, 0), zr(n, 0);
  std::vector<std::size_t> queue;
  for (std::size_t u = 0; u < n; ++u) {
    if (match_left[u] == none) {
      zl[u] = 1;
      queue.push_back(u);
    }
  }
  while (!queue.empty()) {
    const std::size_t u = queue.back();
    queue.pop_back();
    for (std::size_t v : below[u]) {
      if (zr[v] || match_left[u] == v) continue;
      zr[v] = 1;
      const std::size_t w = match_right[v];
      if (w != none && !zl[w]) {
        zl[w] = 1;
        queue.push_back(w);
      }
    }
  }
  for (std::size_t x = 0; x < n; ++x) {
    if (zl[x] && !zr[x]) r.witness.push_back(ids[x]);
  }
  return r;
}

namespace {

class TreeMatrix final : public MatrixProvider {
 public:
  TreeMatrix(std::shared_ptr<const ExplicitTree> t, std::string args) : t_(std::move(t)), args_(std::move(args)) {}

  bool in_index_set(const Ordinal& alpha) const override { return t_->max_offset(alpha).has_value(); }
  bool member(const Ordinal& gamma, Natural xi, const Ordinal& alpha) const override {
    return in_index_set(alpha) && tree_F_member(*t_, gamma, xi, alpha);
  }
  std::optional<std::vector<Ordinal>> enumerate(Natural xi, const Ordinal& alpha) const override {
    if (!in_index_set(alpha)) return std::nullopt;
    std::vector<Ordinal> out;
    for (const auto& [id, n] : t_->nodes()) {
      if (tree_F_member(*t_, id, xi, alpha)) out.push_back(id);
    }
    return out;
  }
  std::optional<Natural> witness_g3(Natural xi, const Ordinal& a, const Ordinal& b) const override {
    return tree_g3_witness(*t_, xi, a, b);
  }
  std::optional<Natural> witness_g4(Natural eta, const Ordinal& a, const Ordinal& b) const override {
    return tree_g4_witness(*t_, eta, a, b);
  }
  bool strong() const override { return true; }
  std::string replay_args() const override { return args_; }

 private:
  std::shared_ptr<const ExplicitTree> t_;
  std::string args_;
};

}  // namespace

ProviderPtr make_tree_provider(std::shared_ptr<const ExplicitTree> t, std::string replay_args) {
  return std::make_shared<TreeMatrix>(std::move(t), std::move(replay_args));
}

// l-infinity nodes.

std::string to_string(const FinSeqNode& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s.values[i]);
  }
  return out + ")";
}

FinSeqNode parse_finseq(std::string_view text, WalkContext& ctx) {
  const std::string s = trim(text);
  if (s.rfind("rho2", 0) == 0) {
    const auto b = s.find("beta=");
    const auto a = s.find("alpha=");
    if (b == std::string::npos || a == std::string::npos || a < b) {
      throw ParseError("expected 'rho2 beta=<ord> alpha=<nat>', got '" + s + "'");
    }
    const Ordinal beta = parse_ordinal(trim(s.substr(b + 5, a - b - 5)));
    const Natural alpha = parse_natural(trim(s.substr(a + 6)), "alpha");
    return gen_rho2_node(beta, alpha, ctx);
  }
  if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw ParseError("expected '(n,...)', got '" + s + "'");
  FinSeqNode node;
  const std::string body = trim(s.substr(1, s.size() - 2));
  if (body.empty()) return node;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) node.values.push_back(parse_natural(trim(item), "sequence value"));
  if (body.back() == ',') throw ParseError("trailing comma in '" + s + "'");
  return node;
}

Natural norm_diff(const FinSeqNode& s, const FinSeqNode& t) {
  Natural out = 0;
  const std::size_t n = std::min(s.dom(), t.dom());
  for (std::size_t i = 0; i < n; ++i) {
    const Natural a = s.values[i];
    const Natural b = t.values[i];
    out = std::max(out, a > b ? a - b : b - a);
  }
  return out;
}

bool linf_F_member(const FinSeqNode& s, const FinSeqNode& t, Natural n) {
  return s.dom() < t.dom() && norm_diff(s, t) <= n;
}

Natural linf_witness_k(const FinSeqNode& s, const FinSeqNode& t, Natural m, Natural n) {
  return norm_diff(t, s) + std::max(m, n);
}

FinSeqNode gen_rho2_node(const Ordinal& beta, Natural alpha, WalkContext& ctx) {
  if (Ordinal::finite(alpha) > beta) {
    throw DomainError("rho2 node needs alpha <= beta, got alpha = " + std::to_string(alpha) + " > " + to_string(beta));
  }
  FinSeqNode node;
  node.generator = std::make_pair(beta, alpha);
  node.values.reserve(alpha);
  for (Natural g = 0; g < alpha; ++g) node.values.push_back(ctx.rho2(Ordinal::finite(g), beta));
  return node;
}

std::vector<std::size_t> coherence_check(const FinSeqNode& s, const FinSeqNode& t) {
  std::vector<std::size_t> out;
  const std::size_t n = std::min(s.dom(), t.dom());
  for (std::size_t i = 0; i < n; ++i) {
    if (s.values[i] != t.values[i]) out.push_back(i);
  }
  return out;
}

NormLowerBound rho2_norm_lower_bound(const Ordinal& beta1, const Ordinal& beta2, const Ordinal& alpha,
                                     const std::vector<Ordinal>& probes, WalkContext& ctx) {
  NormLowerBound r;
  const Ordinal& cap = std::min(beta1, beta2);
  for (const auto& g : probes) {
    if (g >= alpha || g > cap) continue;
    const Natural a = ctx.rho2(g, beta1);
    const Natural b = ctx.rho2(g, beta2);
    r.value = std::max(r.value, a > b ? a - b : b - a);
    ++r.probes;
  }
  return r;
}

CheckRecord verify_linf_witness(const std::vector<FinSeqNode>& universe, Natural mn_max) {
  auto start = Clock::now();
  CheckTally tally("linf-witness", "linf-witness");
  const std::size_t n = universe.size();
  std::vector<Natural> norm(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) norm[i * n + j] = norm_diff(universe[i], universe[j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const FinSeqNode& s = universe[i];
      const FinSeqNode& t = universe[j];
      if (s.dom() > t.dom()) continue;
      for (Natural m = 0; m <= mn_max; ++m) {
        for (Natural nn = 0; nn <= mn_max; ++nn) {
          const Natural k = norm[j * n + i] + std::max(m, nn);
          bool ok = true;
          for (std::size_t u = 0; u < n && ok; ++u) {
            const FinSeqNode& x = universe[u];
            const bool in_s = x.dom() < s.dom() && norm[u * n + i] <= m;
            const bool in_t = x.dom() < t.dom() && norm[u * n + j] <= nn;
            const bool in_k = x.dom() < t.dom() && norm[u * n + j] <= k;
            if ((in_s || in_t) && !in_k) {
              tally.violation({{"s", to_string(s)}, {"t", to_string(t)}, {"m", m}, {"n", nn}, {"k", k},
                               {"u", to_string(x)}},
                              "ordlab tree linf --op witness --s " + shell_quote(to_string(s)) + " --t " +
                                  shell_quote(to_string(t)) + " --m " + std::to_string(m) + " --n " +
                                  std::to_string(nn) + " --u " + shell_quote(to_string(x)));
              ok = false;
            }
          }
          if (ok) tally.ok();
        }
      }
    }
  }
  tally.details()["nodes"] = n;
  tally.details()["mn_max"] = mn_max;
  auto rec = tally.finish();
  rec.millis = elapsed_ms(start);
  return rec;
}

}  // namespace ordlab
