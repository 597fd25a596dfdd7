#include "ordlab/omega_sets.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <functional>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
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

Natural parse_nat(const std::string& s, const std::string& what) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ParseError("expected a natural for " + what + ", got '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::out_of_range&) {
    throw GuardError(what + " '" + s + "' overflows");
  }
}

std::string bits(const std::vector<bool>& v) {
  std::string s;
  for (bool b : v) s += b ? '1' : '0';
  return s;
}

SetExpr make(SetOp op, std::vector<SetExpr> kids) {
  auto n = std::make_shared<SetNode>();
  n->op = op;
  n->kids = std::move(kids);
  return n;
}

}  // namespace

bool EPSet::contains(Natural x) const {
  if (x < prefix.size()) return prefix[x];
  return period[(x - prefix.size()) % period.size()];
}

bool EPSet::infinite() const { return std::find(period.begin(), period.end(), true) != period.end(); }

std::vector<Natural> EPSet::finite_elements() const {
  if (infinite()) throw DomainError("finite_elements of an infinite set");
  std::vector<Natural> out;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (prefix[i]) out.push_back(i);
  }
  return out;
}

void EPSet::normalize() {
  if (period.empty()) throw DomainError("empty period");
  const std::size_t p = period.size();
  for (std::size_t d = 1; d < p; ++d) {
    if (p % d) continue;
    bool ok = true;
    for (std::size_t i = d; i < p && ok; ++i) ok = period[i] == period[i - d];
    if (ok) {
      period.resize(d);
      break;
    }
  }
  while (!prefix.empty() && prefix.back() == period.back()) {
    prefix.pop_back();
    std::rotate(period.rbegin(), period.rbegin() + 1, period.rend());
  }
}

SetExpr ep_set(EPSet e) {
  e.normalize();
  auto n = std::make_shared<SetNode>();
  n->ep = std::move(e);
  return n;
}

SetExpr finite_set(const std::vector<Natural>& elems) {
  EPSet e;
  for (Natural x : elems) {
    if (x >= e.prefix.size()) e.prefix.resize(x + 1, false);
    e.prefix[x] = true;
  }
  return ep_set(std::move(e));
}

SetExpr residue_set(Natural modulus, const std::vector<Natural>& residues) {
  if (modulus == 0) throw DomainError("modulus must be positive");
  EPSet e;
  e.period.assign(modulus, false);
  for (Natural r : residues) {
    if (r >= modulus) throw DomainError("residue " + std::to_string(r) + " not below modulus " + std::to_string(modulus));
    e.period[r] = true;
  }
  return ep_set(std::move(e));
}

SetExpr all_set() { return ep_set(EPSet{{}, {true}}); }
SetExpr empty_set() { return ep_set(EPSet{{}, {false}}); }
SetExpr set_union(SetExpr a, SetExpr b) { return make(SetOp::unite, {std::move(a), std::move(b)}); }
SetExpr set_inter(SetExpr a, SetExpr b) { return make(SetOp::meet, {std::move(a), std::move(b)}); }
SetExpr set_diff(SetExpr a, SetExpr b) { return make(SetOp::diff, {std::move(a), std::move(b)}); }
SetExpr set_comp(SetExpr a) { return make(SetOp::comp, {std::move(a)}); }
SetExpr set_sym(SetExpr a, SetExpr b) { return set_union(set_diff(a, b), set_diff(b, a)); }

SetExpr set_diag(std::vector<SetExpr> kids, std::vector<Natural> cuts) {
  if (kids.size() != cuts.size()) throw DomainError("diag needs one cut per child");
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    if (cuts[i] <= cuts[i - 1]) throw DomainError("diag cuts must be strictly increasing");
  }
  auto n = std::make_shared<SetNode>();
  n->op = SetOp::diag;
  n->kids = std::move(kids);
  n->cuts = std::move(cuts);
  return n;
}

bool member(const SetExpr& e, Natural x) {
  switch (e->op) {
    case SetOp::ep:
      return e->ep.contains(x);
    case SetOp::unite:
      return member(e->kids[0], x) || member(e->kids[1], x);
    case SetOp::meet:
      return member(e->kids[0], x) && member(e->kids[1], x);
    case SetOp::diff:
      return member(e->kids[0], x) && !member(e->kids[1], x);
    case SetOp::comp:
      return !member(e->kids[0], x);
    case SetOp::diag:
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (e->cuts[i] <= x && member(e->kids[i], x)) return true;
      }
      return false;
  }
  return false;
}

namespace {

/// Re-expresses both sets over a common prefix length and period.
template <class Combine>
std::optional<EPSet> combine(const EPSet& a, const EPSet& b, const SetGuards& g, Combine f) {
  const std::size_t len = std::max(a.prefix.size(), b.prefix.size());
  const std::size_t per = std::lcm(a.period.size(), b.period.size());
  if (per > g.max_period || len > g.max_prefix) return std::nullopt;
  EPSet out;
  out.prefix.resize(len);
  out.period.resize(per);
  for (std::size_t x = 0; x < len + per; ++x) {
    const bool v = f(a.contains(x), b.contains(x));
    if (x < len) {
      out.prefix[x] = v;
    } else {
      out.period[x - len] = v;
    }
  }
  out.normalize();
  return out;
}

std::optional<EPSet> cut_below(const EPSet& a, Natural cut, const SetGuards& g) {
  if (cut > g.max_prefix) return std::nullopt;
  EPSet mask;
  mask.prefix.assign(cut, false);
  mask.period = {true};
  return combine(a, mask, g, [](bool x, bool y) { return x && y; });
}

}  // namespace

std::optional<EPSet> to_ep(const SetExpr& e, const SetGuards& g) {
  switch (e->op) {
    case SetOp::ep:
      return e->ep;
    case SetOp::comp: {
      auto k = to_ep(e->kids[0], g);
      if (!k) return std::nullopt;
      k->prefix.flip();
      k->period.flip();
      k->normalize();
      return k;
    }
    case SetOp::unite:
    case SetOp::meet:
    case SetOp::diff: {
      auto a = to_ep(e->kids[0], g);
      if (!a) return std::nullopt;
      auto b = to_ep(e->kids[1], g);
      if (!b) return std::nullopt;
      if (e->op == SetOp::unite) return combine(*a, *b, g, [](bool x, bool y) { return x || y; });
      if (e->op == SetOp::meet) return combine(*a, *b, g, [](bool x, bool y) { return x && y; });
      return combine(*a, *b, g, [](bool x, bool y) { return x && !y; });
    }
    case SetOp::diag: {
      EPSet acc{{}, {false}};
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        auto k = to_ep(e->kids[i], g);
        if (!k) return std::nullopt;
        auto cut = cut_below(*k, e->cuts[i], g);
        if (!cut) return std::nullopt;
        auto next = combine(acc, *cut, g, [](bool x, bool y) { return x || y; });
        if (!next) return std::nullopt;
        acc = std::move(*next);
      }
      return acc;
    }
  }
  return std::nullopt;
}

Finiteness finiteness(const SetExpr& e, const SetGuards& g) {
  Finiteness f;
  if (auto ep = to_ep(e, g)) {
    if (ep->infinite()) {
      f.kind = Finiteness::Kind::infinite;
    } else {
      f.kind = Finiteness::Kind::finite;
      f.elements = ep->finite_elements();
    }
    return f;
  }
  f.kind = Finiteness::Kind::undecided;
  f.reason = "normal form exceeds the period or prefix guard";
  f.scanned = g.scan_bound;
  for (Natural x = 0; x < g.scan_bound; ++x) {
    if (member(e, x)) ++f.hits;
  }
  return f;
}

std::vector<Natural> finite_members(const SetExpr& e, const SetGuards& g) {
  const auto f = finiteness(e, g);
  if (f.kind == Finiteness::Kind::infinite) throw DomainError("set " + to_string(e) + " is infinite");
  if (f.kind == Finiteness::Kind::undecided) {
    throw Undecided("finiteness of " + to_string(e) + " undecided: " + f.reason + " (" + std::to_string(f.hits) +
                    " members below " + std::to_string(f.scanned) + ")");
  }
  return f.elements;
}

std::string to_string(const SetExpr& e) {
  switch (e->op) {
    case SetOp::ep:
      return "(ep prefix=" + bits(e->ep.prefix) + " period=" + bits(e->ep.period) + ")";
    case SetOp::unite:
      return "(union " + to_string(e->kids[0]) + " " + to_string(e->kids[1]) + ")";
    case SetOp::meet:
      return "(inter " + to_string(e->kids[0]) + " " + to_string(e->kids[1]) + ")";
    case SetOp::diff:
      return "(diff " + to_string(e->kids[0]) + " " + to_string(e->kids[1]) + ")";
    case SetOp::comp:
      return "(comp " + to_string(e->kids[0]) + ")";
    case SetOp::diag: {
      std::string s = "(diag (";
      for (std::size_t i = 0; i < e->kids.size(); ++i) s += (i ? " " : "") + to_string(e->kids[i]);
      s += ") cuts=(";
      for (std::size_t i = 0; i < e->cuts.size(); ++i) s += (i ? " " : "") + std::to_string(e->cuts[i]);
      return s + "))";
    }
  }
  return {};
}

namespace {

class SetParser {
 public:
  SetParser(std::string_view text, const std::map<std::string, SetExpr>& names) : names_(names) {
    std::string cur;
    auto flush = [&] {
      if (!cur.empty()) toks_.push_back(std::move(cur));
      cur.clear();
    };
    for (char c : text) {
      if (c == '(' || c == ')') {
        flush();
        toks_.emplace_back(1, c);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        flush();
      } else {
        cur += c;
      }
    }
    flush();
    text_ = std::string(text);
  }

  SetExpr parse_all() {
    SetExpr e = expr();
    if (pos_ != toks_.size()) fail("trailing input '" + toks_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("set expression '" + text_ + "': " + msg); }

  const std::string& peek() const {
    static const std::string end;
    return pos_ < toks_.size() ? toks_[pos_] : end;
  }
  std::string next() {
    if (pos_ >= toks_.size()) fail("unexpected end");
    return toks_[pos_++];
  }
  void expect(const std::string& t) {
    if (next() != t) fail("expected '" + t + "'");
  }

  static std::vector<bool> parse_bits(const std::string& s, bool allow_empty, const SetParser& p) {
    if (s.empty() && !allow_empty) p.fail("period must be nonempty");
    std::vector<bool> out;
    for (char c : s) {
      if (c != '0' && c != '1') p.fail("bit strings use 0 and 1");
      out.push_back(c == '1');
    }
    return out;
  }

  std::string value_of(const std::string& tok, const std::string& key) {
    if (tok.rfind(key + "=", 0) != 0) fail("expected '" + key + "='");
    return tok.substr(key.size() + 1);
  }

  SetExpr expr() {
    const std::string t = next();
    if (t == ")") fail("unexpected ')'");
    if (t != "(") {
      if (t == "all") return all_set();
      if (t == "empty") return empty_set();
      auto it = names_.find(t);
      if (it == names_.end()) fail("unknown name '" + t + "'");
      return it->second;
    }
    const std::string head = next();
    SetExpr out;
    if (head == "ep") {
      EPSet e;
      e.prefix = parse_bits(value_of(next(), "prefix"), true, *this);
      e.period = parse_bits(value_of(next(), "period"), false, *this);
      out = ep_set(std::move(e));
    } else if (head == "fin") {
      std::vector<Natural> xs;
      while (peek() != ")") xs.push_back(parse_nat(next(), "fin element"));
      out = finite_set(xs);
    } else if (head == "mod") {
      const Natural m = parse_nat(next(), "modulus");
      if (m == 0 || m > (Natural{1} << 16)) fail("modulus out of range");
      std::vector<Natural> rs;
      while (peek() != ")") rs.push_back(parse_nat(next(), "residue"));
      try {
        out = residue_set(m, rs);
      } catch (const DomainError& e) {
        fail(e.what());
      }
    } else if (head == "union" || head == "inter") {
      out = expr();
      int n = 1;
      while (peek() != ")") {
        out = head == "union" ? set_union(out, expr()) : set_inter(out, expr());
        ++n;
      }
      if (n < 2) fail(head + " needs at least two operands");
    } else if (head == "diff" || head == "sym") {
      SetExpr a = expr();
      SetExpr b = expr();
      out = head == "diff" ? set_diff(a, b) : set_sym(a, b);
    } else if (head == "comp") {
      out = set_comp(expr());
    } else if (head == "diag") {
      expect("(");
      std::vector<SetExpr> kids;
      while (peek() != ")") kids.push_back(expr());
      expect(")");
      if (next() != "cuts=") fail("expected 'cuts=(...)'");
      expect("(");
      std::vector<Natural> cuts;
      while (peek() != ")") cuts.push_back(parse_nat(next(), "cut"));
      expect(")");
      try {
        out = set_diag(std::move(kids), std::move(cuts));
      } catch (const DomainError& e) {
        fail(e.what());
      }
    } else {
      fail("unknown operator '" + head + "'");
    }
    expect(")");
    return out;
  }

  const std::map<std::string, SetExpr>& names_;
  std::vector<std::string> toks_;
  std::size_t pos_ = 0;
  std::string text_;
};

}  // namespace

SetExpr parse_set(std::string_view text, const std::map<std::string, SetExpr>& names) {
  return SetParser(text, names).parse_all();
}

// Families.

namespace {

std::size_t find_position(const std::vector<Ordinal>& indices, const Ordinal& alpha) {
  auto it = std::lower_bound(indices.begin(), indices.end(), alpha);
  if (it == indices.end() || *it != alpha) throw DomainError(to_string(alpha) + " is not an index of the family");
  return static_cast<std::size_t>(it - indices.begin());
}

bool has(const std::vector<Ordinal>& indices, const Ordinal& alpha) {
  return std::binary_search(indices.begin(), indices.end(), alpha);
}

struct ManifestLine {
  std::size_t lineno;
  std::string text;
};

/// Splits `key=value` fields where a value may be a parenthesised sexpr.
std::map<std::string, std::string> fields(const std::string& rest, const std::function<void(std::string)>& fail) {
  std::map<std::string, std::string> out;
  std::size_t i = 0;
  while (i < rest.size()) {
    while (i < rest.size() && std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
    if (i >= rest.size()) break;
    const auto eq = rest.find('=', i);
    if (eq == std::string::npos) fail("expected key=value in '" + rest.substr(i) + "'");
    const std::string key = rest.substr(i, eq - i);
    std::size_t j = eq + 1;
    if (j < rest.size() && rest[j] == '(') {
      int depth = 0;
      const std::size_t start = j;
      for (; j < rest.size(); ++j) {
        if (rest[j] == '(') ++depth;
        if (rest[j] == ')' && --depth == 0) break;
      }
      if (depth != 0) fail("unbalanced parentheses");
      out[key] = rest.substr(start, j + 1 - start);
      i = j + 1;
    } else {
      const auto end = rest.find_first_of(" \t", j);
      out[key] = rest.substr(j, end == std::string::npos ? std::string::npos : end - j);
      i = end == std::string::npos ? rest.size() : end;
    }
  }
  return out;
}

struct RawFamily {
  std::vector<Ordinal> indices;
  std::vector<SetExpr> a;
  std::vector<std::optional<SetExpr>> b;
  DiffCertificates cert_a;
  DiffCertificates cert_b;
};

RawFamily parse_family(std::string_view text) {
  RawFamily fam;
  std::map<std::string, SetExpr> names;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw ParseError("manifest line " + std::to_string(lineno) + ": " + msg);
    };
    std::istringstream words(line);
    std::string kw;
    words >> kw;
    try {
      if (kw == "set") {
        std::string name, eq;
        words >> name >> eq;
        if (name.empty() || eq != "=") fail("expected 'set NAME = <sexpr>'");
        if (name == "all" || name == "empty") fail("'" + name + "' is reserved");
        std::string rest;
        std::getline(words, rest);
        names[name] = parse_set(trim(rest), names);
      } else if (kw == "index") {
        std::string ord;
        words >> ord;
        std::string rest;
        std::getline(words, rest);
        const Ordinal alpha = parse_ordinal(ord);
        auto f = fields(rest, fail);
        if (!f.contains("a")) fail("index needs a=<set>");
        for (const auto& [k, v] : f) {
          if (k != "a" && k != "b") fail("unknown field '" + k + "'");
        }
        if (!fam.indices.empty() && alpha <= fam.indices.back()) fail("indices must be strictly ascending");
        fam.indices.push_back(alpha);
        fam.a.push_back(parse_set(f["a"], names));
        fam.b.push_back(f.contains("b") ? std::optional<SetExpr>(parse_set(f["b"], names)) : std::nullopt);
      } else if (kw == "cert") {
        std::string o1, o2;
        words >> o1 >> o2;
        std::string rest;
        std::getline(words, rest);
        const Ordinal a1 = parse_ordinal(o1);
        const Ordinal a2 = parse_ordinal(o2);
        if (!(a1 < a2)) fail("certificate pairs need alpha < beta");
        auto f = fields(rest, fail);
        for (const auto& [k, v] : f) {
          if (k == "a") {
            fam.cert_a[{a1, a2}] = parse_nat(v, "certificate");
          } else if (k == "b") {
            fam.cert_b[{a1, a2}] = parse_nat(v, "certificate");
          } else {
            fail("unknown field '" + k + "'");
          }
        }
      } else {
        fail("unknown keyword '" + kw + "'");
      }
    } catch (const ParseError& e) {
      const std::string msg = e.what();
      if (msg.rfind("manifest line", 0) == 0) throw;
      fail(msg);
    }
  }
  return fam;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_cert_indices(const DiffCertificates& c, const std::vector<Ordinal>& indices) {
  for (const auto& [k, m] : c) {
    if (!has(indices, k.first) || !has(indices, k.second)) {
      throw ParseError("certificate for (" + to_string(k.first) + ", " + to_string(k.second) + ") names an unknown index");
    }
  }
}

}  // namespace

std::size_t Tower::position(const Ordinal& alpha) const { return find_position(indices, alpha); }
bool Tower::has_index(const Ordinal& alpha) const { return has(indices, alpha); }
std::size_t PreGap::position(const Ordinal& alpha) const { return find_position(indices, alpha); }
bool PreGap::has_index(const Ordinal& alpha) const { return has(indices, alpha); }

Tower parse_tower(std::string_view text) {
  RawFamily f = parse_family(text);
  if (std::any_of(f.b.begin(), f.b.end(), [](const auto& b) { return b.has_value(); }) || !f.cert_b.empty()) {
    throw ParseError("tower manifests carry only a= sets");
  }
  check_cert_indices(f.cert_a, f.indices);
  return Tower{std::move(f.indices), std::move(f.a), std::move(f.cert_a)};
}

PreGap parse_pregap(std::string_view text) {
  RawFamily f = parse_family(text);
  PreGap g;
  for (std::size_t i = 0; i < f.b.size(); ++i) {
    if (!f.b[i]) throw ParseError("pre-gap index " + to_string(f.indices[i]) + " lacks b=");
    g.b.push_back(*f.b[i]);
  }
  check_cert_indices(f.cert_a, f.indices);
  check_cert_indices(f.cert_b, f.indices);
  g.indices = std::move(f.indices);
  g.a = std::move(f.a);
  g.cert_a = std::move(f.cert_a);
  g.cert_b = std::move(f.cert_b);
  return g;
}

Tower load_tower(const std::string& path) { return parse_tower(read_file(path)); }
PreGap load_pregap(const std::string& path) { return parse_pregap(read_file(path)); }

std::string to_manifest(const Tower& t) {
  std::string out;
  for (std::size_t i = 0; i < t.indices.size(); ++i) {
    out += "index " + to_string(t.indices[i]) + " a=" + to_string(t.sets[i]) + "\n";
  }
  for (const auto& [k, m] : t.certificates) {
    out += "cert " + to_string(k.first) + " " + to_string(k.second) + " a=" + std::to_string(m) + "\n";
  }
  return out;
}

std::string to_manifest(const PreGap& g) {
  std::string out;
  for (std::size_t i = 0; i < g.indices.size(); ++i) {
    out += "index " + to_string(g.indices[i]) + " a=" + to_string(g.a[i]) + " b=" + to_string(g.b[i]) + "\n";
  }
  std::map<std::pair<Ordinal, Ordinal>, std::pair<std::optional<Natural>, std::optional<Natural>>> certs;
  for (const auto& [k, m] : g.cert_a) certs[k].first = m;
  for (const auto& [k, m] : g.cert_b) certs[k].second = m;
  for (const auto& [k, v] : certs) {
    out += "cert " + to_string(k.first) + " " + to_string(k.second);
    if (v.first) out += " a=" + std::to_string(*v.first);
    if (v.second) out += " b=" + std::to_string(*v.second);
    out += "\n";
  }
  return out;
}

namespace {

Natural one_plus_max(const std::vector<Natural>& xs) { return xs.empty() ? 0 : xs.back() + 1; }

}  // namespace

Natural rho_TO(const Tower& t, const Ordinal& alpha, const Ordinal& beta, const SetGuards& g) {
  if (alpha > beta) throw DomainError("rho_TO needs alpha <= beta");
  const auto diff = set_diff(t.set(alpha), t.set(beta));
  return one_plus_max(finite_members(diff, g));
}

Tower build_tower(const std::vector<Ordinal>& indices, const SetExpr& base, const TowerBuildOptions& options) {
  if (indices.empty()) throw DomainError("a tower needs at least one index");
  if (indices.size() > options.max_length) {
    throw GuardError("tower length " + std::to_string(indices.size()) + " exceeds the guard " +
                     std::to_string(options.max_length));
  }
  for (std::size_t i = 1; i < indices.size(); ++i) {
    if (!(indices[i - 1] < indices[i])) throw DomainError("tower indices must be strictly ascending");
  }
  const SetGuards guards;
  auto base_ep = to_ep(base, guards);
  if (!base_ep) throw Undecided("base set has no normal form within the guards");
  if (!to_ep(set_comp(base), guards)->infinite()) throw DomainError("base set must have an infinite complement");

  // Working period: enough complement classes for every later index plus one
  // class that is never used, so complements stay infinite.
  const std::size_t steps = indices.size() - 1;
  const std::size_t p = base_ep->period.size();
  const std::size_t zeros = static_cast<std::size_t>(std::count(base_ep->period.begin(), base_ep->period.end(), false));
  const std::size_t k = (steps + 1 + zeros - 1) / zeros;
  const std::size_t P = p * k;
  const std::size_t L = base_ep->prefix.size();
  std::vector<std::size_t> free_classes;
  for (std::size_t j = 0; j < P; ++j) {
    if (!base_ep->period[j % p]) free_classes.push_back(j);
  }
  auto class_set = [&](std::size_t j) {
    EPSet e;
    e.prefix.assign(L, false);
    e.period.assign(P, false);
    e.period[j] = true;
    return ep_set(std::move(e));
  };

  std::mt19937_64 rng(options.seed);
  Tower t;
  t.indices = indices;
  t.sets.push_back(ep_set(*base_ep));
  std::size_t used = 0;
  for (std::size_t i = 1; i < indices.size(); ++i) {
    const SetExpr succ = ep_set(*to_ep(set_union(t.sets.back(), class_set(free_classes[used++])), guards));
    if (!indices[i].is_limit()) {
      t.sets.push_back(succ);
      continue;
    }
    std::vector<SetExpr> kids;
    for (std::size_t j = 0; j < i; ++j) {
      if (in_c_seq(indices[i], indices[j])) kids.push_back(t.sets[j]);
    }
    kids.push_back(succ);
    std::vector<Natural> cuts;
    Natural cut = rng() % 3;
    for (std::size_t j = 0; j < kids.size(); ++j) {
      cuts.push_back(cut);
      cut += 1 + rng() % 5;
    }
    t.sets.push_back(set_diag(std::move(kids), std::move(cuts)));
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (std::size_t j = i + 1; j < indices.size(); ++j) {
      t.certificates[{indices[i], indices[j]}] = rho_TO(t, indices[i], indices[j], guards);
    }
  }
  return t;
}

namespace {

json sample_members(const SetExpr& e, std::size_t count, Natural bound) {
  json out = json::array();
  for (Natural x = 0; x < bound && out.size() < count; ++x) {
    if (member(e, x)) out.push_back(x);
  }
  return out;
}

json elements_json(const std::vector<Natural>& xs) { return json(xs); }

/// Checks one certificate against the exact difference.
void check_certificate(CheckTally& tally, const SetExpr& diff, Natural m, json where, const std::string& replay,
                       const SetGuards& g, std::size_t& loose) {
  const auto f = finiteness(diff, g);
  if (f.kind == Finiteness::Kind::undecided) {
    for (Natural x = m; x < m + g.scan_bound; ++x) {
      if (member(diff, x)) {
        where["element"] = x;
        where["bound"] = m;
        where["reason"] = "difference has an element at or above the certified bound";
        tally.violation(where, replay);
        return;
      }
    }
    tally.undecided("certificate not refuted below " + std::to_string(m + g.scan_bound) + " but not decided");
    return;
  }
  if (f.kind == Finiteness::Kind::infinite) {
    where["bound"] = m;
    where["reason"] = "difference is infinite";
    where["sample"] = sample_members(diff, 5, 1u << 16);
    tally.violation(where, replay);
    return;
  }
  if (!f.elements.empty() && f.elements.back() >= m) {
    where["bound"] = m;
    where["element"] = f.elements.back();
    where["reason"] = "difference has an element at or above the certified bound";
    tally.violation(where, replay);
    return;
  }
  if (one_plus_max(f.elements) != m) ++loose;
  tally.ok();
}

}  // namespace

AxiomReport validate_tower(const Tower& t, const std::string& replay, const SetGuards& g) {
  AxiomReport report;
  const std::size_t n = t.indices.size();
  std::vector<std::vector<std::optional<Natural>>> rho(n, std::vector<std::optional<Natural>>(n));
  auto pair_json = [&](std::size_t i, std::size_t j) {
    return json{{"alpha", to_string(t.indices[i])}, {"beta", to_string(t.indices[j])}};
  };
  auto finish = [&](CheckTally& tally, Clock::time_point start) {
    auto rec = tally.finish();
    rec.millis = elapsed_ms(start);
    rec.details["indices"] = n;
    report.add(std::move(rec));
  };

  {
    auto start = Clock::now();
    CheckTally tally("tower-almost-increasing", "tower-almost-inclusion");
    for (std::size_t i = 0; i < n; ++i) {
      rho[i][i] = 0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto diff = set_diff(t.sets[i], t.sets[j]);
        const auto f = finiteness(diff, g);
        if (f.kind == Finiteness::Kind::finite) {
          rho[i][j] = one_plus_max(f.elements);
          tally.ok();
        } else if (f.kind == Finiteness::Kind::infinite) {
          json cex = pair_json(i, j);
          cex["reason"] = "a_alpha \\ a_beta is infinite";
          cex["sample"] = sample_members(diff, 5, 1u << 16);
          tally.violation(cex, replay);
        } else {
          tally.undecided("a_alpha \\ a_beta undecided for " + pair_json(i, j).dump());
        }
      }
    }
    finish(tally, start);
  }

  {
    auto start = Clock::now();
    CheckTally tally("tower-strict", "tower-strict");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto diff = set_diff(t.sets[j], t.sets[i]);
        const auto f = finiteness(diff, g);
        if (f.kind == Finiteness::Kind::infinite) {
          tally.ok();
        } else if (f.kind == Finiteness::Kind::finite) {
          json cex = pair_json(i, j);
          cex["reason"] = "a_beta \\ a_alpha is finite";
          cex["difference"] = elements_json(f.elements);
          tally.violation(cex, replay);
        } else {
          tally.undecided("a_beta \\ a_alpha undecided for " + pair_json(i, j).dump());
        }
      }
    }
    finish(tally, start);
  }

  {
    auto start = Clock::now();
    CheckTally tally("tower-certificates", "difference-certificate");
    std::size_t loose = 0;
    for (const auto& [k, m] : t.certificates) {
      const std::size_t i = t.position(k.first);
      const std::size_t j = t.position(k.second);
      check_certificate(tally, set_diff(t.sets[i], t.sets[j]), m, pair_json(i, j), replay, g, loose);
    }
    if (t.certificates.empty()) tally.skip("no certificates recorded");
    tally.details()["certificates"] = t.certificates.size();
    tally.details()["not_tight"] = loose;
    finish(tally, start);
  }

  {
    auto start = Clock::now();
    CheckTally tally("tower-transitive", "transitive-tower");
    bool complete = true;
    for (std::size_t i = 0; i < n && complete; ++i) {
      for (std::size_t j = i; j < n && complete; ++j) complete = rho[i][j].has_value();
    }
    if (!complete) {
      tally.skip("some rho_TO values are unavailable");
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
          for (std::size_t l = j; l < n; ++l) {
            if (*rho[i][l] > std::max(*rho[i][j], *rho[j][l])) {
              json cex{{"alpha", to_string(t.indices[i])}, {"beta", to_string(t.indices[j])},
                       {"gamma", to_string(t.indices[l])}, {"rho_ag", *rho[i][l]}, {"rho_ab", *rho[i][j]},
                       {"rho_bg", *rho[j][l]}};
              tally.violation(cex, replay);
            } else {
              tally.ok();
            }
          }
        }
      }
    }
    finish(tally, start);
  }

  report.canonicalize();
  return report;
}

AxiomReport validate_pregap(const PreGap& gp, const std::string& replay, const SetGuards& g) {
  AxiomReport report;
  const std::size_t n = gp.indices.size();
  auto pair_json = [&](std::size_t i, std::size_t j) {
    return json{{"alpha", to_string(gp.indices[i])}, {"beta", to_string(gp.indices[j])}};
  };
  auto finish = [&](CheckTally& tally, Clock::time_point start) {
    auto rec = tally.finish();
    rec.millis = elapsed_ms(start);
    rec.details["indices"] = n;
    report.add(std::move(rec));
  };

  for (const char side : {'a', 'b'}) {
    auto start = Clock::now();
    const auto& sets = side == 'a' ? gp.a : gp.b;
    CheckTally tally(std::string("pregap-") + side + "-increasing", "pregap-increasing");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto diff = set_diff(sets[i], sets[j]);
        const auto f = finiteness(diff, g);
        if (f.kind == Finiteness::Kind::finite) {
          tally.ok();
        } else if (f.kind == Finiteness::Kind::infinite) {
          json cex = pair_json(i, j);
          cex["side"] = std::string(1, side);
          cex["reason"] = "difference is infinite";
          cex["sample"] = sample_members(diff, 5, 1u << 16);
          tally.violation(cex, replay);
        } else {
          tally.undecided("difference undecided for " + pair_json(i, j).dump());
        }
      }
    }
    finish(tally, start);
  }

  {
    auto start = Clock::now();
    CheckTally tally("pregap-disjoint", "pregap-disjoint");
    for (std::size_t i = 0; i < n; ++i) {
      const auto f = finiteness(set_inter(gp.a[i], gp.b[i]), g);
      if (f.kind == Finiteness::Kind::finite && f.elements.empty()) {
        tally.ok();
      } else if (f.kind == Finiteness::Kind::undecided) {
        tally.undecided("a_alpha ∩ b_alpha undecided at " + to_string(gp.indices[i]));
      } else {
        json cex{{"alpha", to_string(gp.indices[i])}, {"reason", "a_alpha ∩ b_alpha is not empty"}};
        cex["sample"] = f.kind == Finiteness::Kind::finite ? json(f.elements)
                                                            : sample_members(set_inter(gp.a[i], gp.b[i]), 5, 1u << 16);
        tally.violation(cex, replay);
      }
    }
    finish(tally, start);
  }

  {
    // a_alpha ∩ b_beta ⊆ a_alpha \ a_beta and the intersection is finite.
    auto start = Clock::now();
    CheckTally tally("pregap-cross-finite", "cross-finite");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const auto cross = set_inter(gp.a[i], gp.b[j]);
        const auto outside = set_diff(cross, set_diff(gp.a[i], gp.a[j]));
        const auto fo = finiteness(outside, g);
        const auto fc = finiteness(cross, g);
        if (fo.kind == Finiteness::Kind::undecided || fc.kind == Finiteness::Kind::undecided) {
          tally.undecided("cross intersection undecided for " + pair_json(i, j).dump());
          continue;
        }
        const bool contained = fo.kind == Finiteness::Kind::finite && fo.elements.empty();
        if (contained && fc.kind == Finiteness::Kind::finite) {
          tally.ok();
          continue;
        }
        json cex = pair_json(i, j);
        cex["reason"] = contained ? "a_alpha ∩ b_beta is infinite" : "a_alpha ∩ b_beta not inside a_alpha \\ a_beta";
        cex["sample"] = sample_members(contained ? cross : outside, 5, 1u << 16);
        tally.violation(cex, replay);
      }
    }
    finish(tally, start);
  }

  {
    auto start = Clock::now();
    CheckTally tally("pregap-certificates", "difference-certificate");
    std::size_t loose = 0;
    for (const char side : {'a', 'b'}) {
      const auto& certs = side == 'a' ? gp.cert_a : gp.cert_b;
      const auto& sets = side == 'a' ? gp.a : gp.b;
      for (const auto& [k, m] : certs) {
        const std::size_t i = gp.position(k.first);
        const std::size_t j = gp.position(k.second);
        json where = pair_json(i, j);
        where["side"] = std::string(1, side);
        check_certificate(tally, set_diff(sets[i], sets[j]), m, where, replay, g, loose);
      }
    }
    if (gp.cert_a.empty() && gp.cert_b.empty()) tally.skip("no certificates recorded");
    tally.details()["not_tight"] = loose;
    finish(tally, start);
  }

  report.canonicalize();
  return report;
}

bool gap_F_member(const PreGap& gp, const Ordinal& alpha, Natural xi, const Ordinal& beta, const SetGuards& g) {
  if (!(alpha < beta)) throw DomainError("F^G needs alpha < beta");
  const auto cross = finite_members(set_inter(gp.a[gp.position(alpha)], gp.b[gp.position(beta)]), g);
  return one_plus_max(cross) <= xi;
}

SplitResult splitter_check(const SetExpr& c, const PreGap& gp, const SetGuards& g) {
  SplitResult r;
  const std::size_t n = gp.indices.size();
  std::vector<Natural> xi(n, 0);
  for (const char side : {'a', 'b'}) {
    for (std::size_t i = 0; i < n; ++i) {
      const SetExpr rest = side == 'a' ? set_diff(gp.a[i], c) : set_inter(gp.b[i], c);
      const auto f = finiteness(rest, g);
      if (f.kind == Finiteness::Kind::undecided) {
        throw Undecided("splitter condition undecided at index " + to_string(gp.indices[i]) + ", side " + side);
      }
      if (f.kind == Finiteness::Kind::infinite) {
        r.splits = false;
        r.index = gp.indices[i];
        r.side = std::string(1, side);
        return r;
      }
      xi[i] = std::max(xi[i], one_plus_max(f.elements));
    }
  }
  r.splits = true;
  for (std::size_t i = 0; i < n; ++i) r.least_xi.emplace_back(gp.indices[i], xi[i]);
  return r;
}

std::vector<Ordinal> hausdorff_check(const Tower& t, Natural n, const Ordinal& beta, const SetGuards& g) {
  std::vector<Ordinal> out;
  t.position(beta);
  for (const auto& a : t.indices) {
    if (a >= beta) break;
    if (rho_TO(t, a, beta, g) <= n) out.push_back(a);
  }
  return out;
}

std::vector<Ordinal> hausdorff_check(const PreGap& gp, Natural n, const Ordinal& beta, const SetGuards& g) {
  std::vector<Ordinal> out;
  gp.position(beta);
  for (const auto& a : gp.indices) {
    if (a >= beta) break;
    if (gap_F_member(gp, a, n, beta, g)) out.push_back(a);
  }
  return out;
}

namespace {

/// Shared shape of the tower and gap adapters: a precomputed table of
/// r(alpha, beta) = least xi with alpha ∈ F_xi(beta) over the indices.
/// An infinite difference means alpha is in no F_xi(beta).
struct PairTable {
  std::vector<std::vector<std::optional<Natural>>> r;
  std::set<std::pair<std::size_t, std::size_t>> undecided;
};

class FamilyMatrix : public MatrixProvider {
 public:
  FamilyMatrix(std::vector<Ordinal> indices, PairTable table, std::string args, bool transitive)
      : indices_(std::move(indices)), t_(std::move(table)), args_(std::move(args)), transitive_(transitive) {}

  bool in_index_set(const Ordinal& alpha) const override { return has(indices_, alpha); }

  bool member(const Ordinal& gamma, Natural xi, const Ordinal& alpha) const override {
    if (gamma >= alpha || !has(indices_, gamma) || !has(indices_, alpha)) return false;
    const auto v = value(gamma, alpha);
    return v && *v <= xi;
  }

  std::optional<std::vector<Ordinal>> enumerate(Natural xi, const Ordinal& alpha) const override {
    if (!has(indices_, alpha)) return std::nullopt;
    std::vector<Ordinal> out;
    for (const auto& g : indices_) {
      if (g >= alpha) break;
      if (member(g, xi, alpha)) out.push_back(g);
    }
    return out;
  }

  std::optional<Natural> witness_g3(Natural xi, const Ordinal& a, const Ordinal& b) const override {
    if (!transitive_) return std::nullopt;
    if (a == b) return xi;
    const auto v = value(a, b);
    if (!v) throw DomainError("no xi puts " + to_string(a) + " below " + to_string(b));
    return std::max(xi, *v);
  }

  std::optional<Natural> direct_rho(const Ordinal& gamma, const Ordinal& alpha) const override {
    if (gamma >= alpha || !has(indices_, gamma) || !has(indices_, alpha)) return std::nullopt;
    return value(gamma, alpha);
  }

  std::string replay_args() const override { return args_; }

 private:
  std::optional<Natural> value(const Ordinal& g, const Ordinal& a) const {
    const std::size_t i = find_position(indices_, g);
    const std::size_t j = find_position(indices_, a);
    if (t_.undecided.contains({i, j})) throw Undecided("pair (" + to_string(g) + ", " + to_string(a) + ") is undecided");
    return t_.r[i][j];
  }

  std::vector<Ordinal> indices_;
  PairTable t_;
  std::string args_;
  bool transitive_;
};

template <class F>
PairTable make_table(std::size_t n, F f) {
  PairTable t;
  t.r.assign(n, std::vector<std::optional<Natural>>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      try {
        t.r[i][j] = f(i, j);
      } catch (const Undecided&) {
        t.undecided.insert({i, j});
      } catch (const DomainError&) {
        // Infinite: never a member.
      }
    }
  }
  return t;
}

}  // namespace

ProviderPtr make_tower_provider(std::shared_ptr<const Tower> t, std::string replay_args) {
  auto r = make_table(t->indices.size(),
                      [&](std::size_t i, std::size_t j) { return rho_TO(*t, t->indices[i], t->indices[j]); });
  return std::make_shared<FamilyMatrix>(t->indices, std::move(r), std::move(replay_args), true);
}

ProviderPtr make_gap_provider(std::shared_ptr<const PreGap> g, std::string replay_args) {
  auto r = make_table(g->indices.size(), [&](std::size_t i, std::size_t j) {
    return one_plus_max(finite_members(set_inter(g->a[i], g->b[j])));
  });
  return std::make_shared<FamilyMatrix>(g->indices, std::move(r), std::move(replay_args), false);
}

}  // namespace ordlab
