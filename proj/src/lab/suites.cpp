#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <tuple>

#include "internal.hpp"
#include "ordlab/error.hpp"

namespace ordlab {

namespace fs = std::filesystem;
using lab::Clock;
using lab::ms_since;
using lab::uniform;

namespace lab {

Ordinal random_below(std::mt19937_64& rng, const Ordinal& bound, Natural cap) {
  if (bound.is_zero()) throw DomainError("nothing lies below 0");
  if (bound.is_finite()) return Ordinal::finite(uniform(rng, 0, bound.to_natural() - 1));
  if (bound.is_successor()) {
    const Ordinal a = predecessor(bound);
    if ((rng() & 1) != 0 || a.is_zero()) return a;
    return random_below(rng, a, cap);
  }
  return random_below(rng, fund_seq(bound, uniform(rng, 1, cap + 1)), cap);
}

Ordinal random_cnf(std::mt19937_64& rng, const Ordinal& exponent_bound, Natural coef_bound, int max_terms) {
  const Natural n = uniform(rng, 0, static_cast<Natural>(max_terms));
  std::set<Ordinal, std::greater<>> exps;
  for (Natural i = 0; i < n; ++i) exps.insert(random_below(rng, exponent_bound, coef_bound));
  std::vector<Term> terms;
  for (const auto& e : exps) terms.push_back({e, uniform(rng, 1, coef_bound)});
  return Ordinal::from_terms(std::move(terms));
}

namespace {

Natural scan_count(const Ordinal& beta, const Ordinal& alpha) {
  if (beta.is_successor()) return predecessor(beta) < alpha ? 1 : 0;
  Natural n = 0;
  while (fund_seq(beta, n) < alpha) ++n;
  return n;
}

Ordinal scan_step(const Ordinal& beta, const Ordinal& alpha) {
  if (beta.is_successor()) return predecessor(beta);
  Natural n = 0;
  while (fund_seq(beta, n) < alpha) ++n;
  return fund_seq(beta, n);
}

}  // namespace

Natural LiteralWalks::rho(const Ordinal& a, const Ordinal& b) {
  if (a == b) return 0;
  const auto key = std::make_pair(a, b);
  if (auto it = rho_.find(key); it != rho_.end()) return it->second;
  Natural v = 0;
  if (b.is_successor()) {
    v = rho(a, predecessor(b));
  } else {
    const Natural k = scan_count(b, a);
    v = std::max(k, rho(a, scan_step(b, a)));
    for (Natural i = 0; i < k; ++i) v = std::max(v, rho(fund_seq(b, i), a));
  }
  rho_[key] = v;
  return v;
}

Natural LiteralWalks::rho1(const Ordinal& a, const Ordinal& b) {
  if (a == b) return 0;
  const Natural k = b.is_successor() ? 0 : scan_count(b, a);
  return std::max(k, rho1(a, scan_step(b, a)));
}

std::vector<Ordinal> sublevel_scan(LiteralWalks& w, WalkFn fn, const Ordinal& alpha, Natural c) {
  const Ordinal w3 = Ordinal::omega_power(Ordinal::finite(1), 3);
  if (alpha >= w3) throw DomainError("the sublevel scan covers alpha < w*3 only");
  if (fn != WalkFn::rho && fn != WalkFn::rho1) throw Unsupported("sublevel scan is for rho and rho1");
  const Natural j = alpha.is_finite() ? 0 : alpha.leading_exponent().is_zero() ? 0 : alpha.terms().front().coefficient;
  const Natural n = alpha.finite_part();
  std::vector<Ordinal> out;
  for (Natural jj = 0; jj <= j; ++jj) {
    for (Natural m = 0; m <= n + c + 5; ++m) {
      const Ordinal x = add(Ordinal::omega_power(Ordinal::finite(1), jj), Ordinal::finite(m));
      if (x > alpha) continue;
      const Natural v = fn == WalkFn::rho ? w.rho(x, alpha) : w.rho1(x, alpha);
      if (v <= c) out.push_back(x);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GroupElement> sample_elements(std::uint64_t seed, const std::vector<Ordinal>& universe, std::size_t count) {
  std::mt19937_64 rng(seed ^ 0x5eed0fe1e3e47ULL);
  std::vector<GroupElement> out;
  if (universe.empty()) return out;
  for (std::size_t i = 0; i < count; ++i) {
    const Natural size = uniform(rng, 0, 4);
    std::vector<Ordinal> picks;
    for (Natural k = 0; k < size; ++k) picks.push_back(universe[rng() % universe.size()]);
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    out.emplace_back(std::move(picks));
  }
  return out;
}

std::vector<Neighborhood> full_base(const ProviderPtr& p, const std::vector<Ordinal>& universe, Natural xi_max) {
  std::vector<Neighborhood> base;
  for (const auto& a : universe) {
    if (!p->in_index_set(a)) continue;
    for (Natural xi = 0; xi <= xi_max; ++xi) base.push_back(BasicNbhd{xi, a, p});
  }
  return base;
}

json restriction_case(const MatrixProvider& p, const Ordinal& delta, Natural xi, const Ordinal& alpha,
                      const std::vector<Ordinal>& universe, Natural* eta_out) {
  Natural eta = 0;
  try {
    eta = restriction_cover(delta, xi, alpha, p, universe);
  } catch (const Unsupported&) {
    throw;
  } catch (const Error& e) {
    return {{"delta", to_string(delta)}, {"xi", xi}, {"alpha", to_string(alpha)}, {"error", e.what()}};
  }
  if (eta_out) *eta_out = eta;
  for (const auto& g : universe) {
    if (g < delta && p.member(g, xi, alpha) && !p.member(g, eta, delta)) {
      return {{"delta", to_string(delta)}, {"xi", xi}, {"alpha", to_string(alpha)}, {"eta", eta},
              {"gamma", to_string(g)}};
    }
  }
  return nullptr;
}

std::vector<Ordinal> tower_layout(std::size_t length) {
  std::vector<Ordinal> idx;
  if (length == 0) return idx;
  if (length == 1) return {Ordinal::finite(0)};
  const std::size_t before = length / 2;
  for (std::size_t i = 0; i < before; ++i) idx.push_back(Ordinal::finite(i));
  for (std::size_t k = 0; k < length - before; ++k) idx.push_back(add(Ordinal::omega(), Ordinal::finite(k)));
  return idx;
}

Tower lab_tower(std::size_t length, std::uint64_t seed, const SetExpr& base) {
  TowerBuildOptions o;
  o.max_length = std::max<std::size_t>(o.max_length, length);
  o.seed = seed;
  return build_tower(tower_layout(length), base, o);
}

Natural tree_xi_bound(const ExplicitTree& t, Natural cap) {
  Natural bound = cap;
  for (const auto& level : t.levels()) {
    Natural run = 0;
    while (t.contains(add(level, Ordinal::finite(run + 1)))) ++run;
    bound = std::min(bound, run);
  }
  return bound;
}

const std::vector<SplitExample>& split_examples() {
  static const std::vector<SplitExample> v{
      {"(mod 4 0 1)", true, "", ""},
      {"all", false, "0", "b"},
      {"(mod 2 0)", false, "1", "a"},
  };
  return v;
}

std::string universe_arg(const UniverseSpec& u) { return u.source; }

Report command_report(json config, const AxiomReport& r) {
  Report rep;
  rep.config = std::move(config);
  rep.records = r.records;
  return rep;
}

}  // namespace lab

// ---- sampling and universes

std::vector<Ordinal> sample_ordinals(std::uint64_t seed, const Ordinal& exponent_bound, Natural coefficient_bound,
                                     std::size_t count) {
  if (exponent_bound.is_zero() || coefficient_bound == 0) throw DomainError("sampler bounds must be positive");
  std::mt19937_64 rng(seed);
  std::set<Ordinal> out;
  const std::size_t attempts = count * 64 + 64;
  for (std::size_t i = 0; i < attempts && out.size() < count; ++i) {
    out.insert(lab::random_cnf(rng, exponent_bound, coefficient_bound));
  }
  return {out.begin(), out.end()};
}

std::vector<Ordinal> mixed_universe() {
  std::vector<Ordinal> u;
  for (Natural n = 0; n < 30; ++n) u.push_back(Ordinal::finite(n));
  for (const char* s : {"w", "w+1", "w*2", "w^2", "w^w"}) u.push_back(parse_ordinal(s));
  return u;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

Natural parse_nat(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != s.size() || s.empty() || s[0] == '-') throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(what + ": expected a natural number, got '" + s + "'");
  }
}

}  // namespace

UniverseSpec parse_universe_arg(const std::string& text) {
  UniverseSpec u;
  u.source = text;
  if (text == "mixed") return u;
  if (text.rfind("random:", 0) == 0) {
    const auto parts = split(text.substr(7), ':');
    if (parts.size() != 3) throw ParseError("universe sampler: expected random:<exp bound>:<coef bound>:<count>");
    u.kind = UniverseSpec::Kind::random;
    u.exponent_bound = parse_ordinal(parts[0]);
    u.coefficient_bound = parse_nat(parts[1], "universe sampler");
    u.count = parse_nat(parts[2], "universe sampler");
    if (u.exponent_bound.is_zero() || u.coefficient_bound == 0) throw ParseError("universe sampler bounds must be positive");
    return u;
  }
  u.kind = UniverseSpec::Kind::list;
  std::ifstream in(text);
  if (!in) throw ConfigError("universe file '" + text + "' not found");
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    try {
      u.list.push_back(parse_ordinal(line));
    } catch (const ParseError& e) {
      throw ParseError("universe line " + std::to_string(no) + ": " + e.what());
    }
  }
  std::sort(u.list.begin(), u.list.end());
  u.list.erase(std::unique(u.list.begin(), u.list.end()), u.list.end());
  return u;
}

std::vector<Ordinal> resolve_universe(const UniverseSpec& u, std::uint64_t seed) {
  switch (u.kind) {
    case UniverseSpec::Kind::mixed:
      return mixed_universe();
    case UniverseSpec::Kind::list:
      return u.list;
    case UniverseSpec::Kind::random:
      return sample_ordinals(seed, u.exponent_bound, u.coefficient_bound, u.count);
  }
  return {};
}

Flip parse_flip(std::string_view text) {
  const auto parts = split(std::string(text), ',');
  if (parts.size() != 3) throw ParseError("flip: expected 'gamma,xi,alpha'");
  return Flip{parse_ordinal(trim(parts[0])), parse_nat(trim(parts[1]), "flip"), parse_ordinal(trim(parts[2]))};
}

ProviderPtr make_provider(const std::string& spec, const std::optional<Flip>& flip) {
  ProviderPtr p;
  if (spec == "rho" || spec == "rho1") {
    p = make_walk_provider(parse_walk_fn(spec));
  } else if (auto colon = spec.find(':'); colon != std::string::npos) {
    const std::string kind = spec.substr(0, colon);
    const std::string file = spec.substr(colon + 1);
    const std::string args = "--provider " + shell_quote(spec);
    if (kind == "tower") {
      p = make_tower_provider(std::make_shared<const Tower>(load_tower(file)), args);
    } else if (kind == "tree") {
      p = make_tree_provider(std::make_shared<const ExplicitTree>(load_tree(file)), args);
    } else if (kind == "gap") {
      p = make_gap_provider(std::make_shared<const PreGap>(load_pregap(file)), args);
    } else {
      throw ParseError("unknown provider kind '" + kind + "'");
    }
  } else {
    throw ParseError("unknown provider '" + spec + "'");
  }
  if (flip) p = make_flipped(p, flip->gamma, flip->xi, flip->alpha);
  return p;
}

// ---- configuration

std::vector<std::string> builtin_suites() {
  return {"rho-full", "walks", "sublevel", "matrix", "group", "tree", "linf", "tower", "gap", "full"};
}

namespace {

std::vector<std::string> sections_of(const std::string& suite) {
  if (suite == "full") return {"walks", "sublevel", "matrix", "group", "tree", "linf", "tower", "gap"};
  if (suite == "rho-full") return {"walks", "matrix", "group"};
  return {suite};
}

std::string resolve_path(const std::string& p, const std::string& base_dir) {
  if (p.empty()) return p;
  fs::path path(p);
  if (path.is_relative() && !base_dir.empty()) path = fs::path(base_dir) / path;
  return path.lexically_normal().string();
}

std::string data_file(const char* name) { return (fs::path(ORDLAB_DATA_DIR) / name).string(); }

template <class T>
T get_field(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* s) { return k == s; })) {
      throw ConfigError("unknown config field '" + where + k + "'");
    }
  }
}

std::string flip_string(const Flip& f) {
  return to_string(f.gamma) + "," + std::to_string(f.xi) + "," + to_string(f.alpha);
}

}  // namespace

SuiteConfig config_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"suite", "seed", "provider", "flip", "universe", "xi_max", "samples", "files", "output", "jobs"}, "");
  SuiteConfig c;
  c.suite = get_field<std::string>(j, "suite", c.suite);
  c.seed = get_field<std::uint64_t>(j, "seed", c.seed);
  c.provider = get_field<std::string>(j, "provider", c.provider);
  c.xi_max = get_field<Natural>(j, "xi_max", c.xi_max);
  c.jobs = get_field<std::size_t>(j, "jobs", c.jobs);
  try {
    if (j.contains("flip") && !j.at("flip").is_null()) c.flip = parse_flip(get_field<std::string>(j, "flip", ""));
    // Provider files live next to the config like every other path.
    if (auto colon = c.provider.find(':'); colon != std::string::npos) {
      c.provider = c.provider.substr(0, colon + 1) + resolve_path(c.provider.substr(colon + 1), base_dir);
    }
    std::string universe = get_field<std::string>(j, "universe", "mixed");
    if (universe != "mixed" && universe.rfind("random:", 0) != 0) universe = resolve_path(universe, base_dir);
    c.universe = parse_universe_arg(universe);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }

  const json samples = j.value("samples", json::object());
  if (!samples.is_object()) throw ConfigError("config field 'samples' must be an object");
  reject_unknown(samples,
                 {"triples", "group_elements", "restriction_triples", "mutations", "linf_nodes", "tower_length"},
                 "samples.");
  c.triples = get_field<std::size_t>(samples, "triples", c.triples);
  c.group_elements = get_field<std::size_t>(samples, "group_elements", c.group_elements);
  c.restriction_triples = get_field<std::size_t>(samples, "restriction_triples", c.restriction_triples);
  c.mutations = get_field<std::size_t>(samples, "mutations", c.mutations);
  c.linf_nodes = get_field<std::size_t>(samples, "linf_nodes", c.linf_nodes);
  c.tower_length = get_field<std::size_t>(samples, "tower_length", c.tower_length);

  const json files = j.value("files", json::object());
  if (!files.is_object()) throw ConfigError("config field 'files' must be an object");
  reject_unknown(files, {"tree", "tree_mutant", "pregap", "pregap_single", "tower"}, "files.");
  auto file = [&](const char* key, const char* fallback) {
    if (files.contains(key)) return resolve_path(get_field<std::string>(files, key, ""), base_dir);
    return fallback ? data_file(fallback) : std::string{};
  };
  c.tree_file = file("tree", "tree_3level.txt");
  c.tree_mutant_file = file("tree_mutant", "tree_two_parent.txt");
  c.pregap_file = file("pregap", "gap_mod4.txt");
  c.pregap_single_file = file("pregap_single", "gap_single.txt");
  c.tower_file = file("tower", "tower_two.txt");

  const json output = j.value("output", json::object());
  if (!output.is_object()) throw ConfigError("config field 'output' must be an object");
  reject_unknown(output, {"dir", "format"}, "output.");
  c.out_dir = resolve_path(get_field<std::string>(output, "dir", ""), base_dir);
  c.format = get_field<std::string>(output, "format", c.format);
  return c;
}

json config_echo(const SuiteConfig& c) {
  return {{"suite", c.suite},
          {"seed", c.seed},
          {"provider", c.provider},
          {"flip", c.flip ? json(flip_string(*c.flip)) : json(nullptr)},
          {"universe", c.universe.source},
          {"xi_max", c.xi_max},
          {"samples",
           {{"triples", c.triples},
            {"group_elements", c.group_elements},
            {"restriction_triples", c.restriction_triples},
            {"mutations", c.mutations},
            {"linf_nodes", c.linf_nodes},
            {"tower_length", c.tower_length}}},
          {"files",
           {{"tree", c.tree_file},
            {"tree_mutant", c.tree_mutant_file},
            {"pregap", c.pregap_file},
            {"pregap_single", c.pregap_single_file},
            {"tower", c.tower_file}}}};
}

void validate_config(const SuiteConfig& c) {
  const auto suites = builtin_suites();
  if (std::find(suites.begin(), suites.end(), c.suite) == suites.end()) {
    throw ConfigError("unknown suite '" + c.suite + "'");
  }
  if (c.format != "json" && c.format != "csv" && c.format != "text") {
    throw ConfigError("unknown output format '" + c.format + "'");
  }
  if (c.jobs == 0) throw ConfigError("jobs must be at least 1");
  auto guard = [](const std::string& what, auto&& fn) {
    try {
      fn();
    } catch (const ConfigError& e) {
      throw ConfigError(what + ": " + e.what());
    } catch (const Error& e) {
      throw ConfigError(what + ": " + e.what());
    }
  };
  auto exists = [](const std::string& what, const std::string& path) {
    if (!fs::is_regular_file(path)) throw ConfigError(what + ": file '" + path + "' not found");
  };
  guard("provider", [&] { (void)make_provider(c.provider, c.flip); });
  if (!c.tree_file.empty()) {
    exists("files.tree", c.tree_file);
    guard("files.tree", [&] { (void)load_tree(c.tree_file); });
  }
  if (!c.tree_mutant_file.empty()) {
    exists("files.tree_mutant", c.tree_mutant_file);
    guard("files.tree_mutant", [&] { (void)load_tree(c.tree_mutant_file); });
  }
  if (!c.pregap_file.empty()) {
    exists("files.pregap", c.pregap_file);
    guard("files.pregap", [&] { (void)load_pregap(c.pregap_file); });
  }
  if (!c.pregap_single_file.empty()) {
    exists("files.pregap_single", c.pregap_single_file);
    guard("files.pregap_single", [&] { (void)load_pregap(c.pregap_single_file); });
  }
  if (!c.tower_file.empty()) {
    exists("files.tower", c.tower_file);
    guard("files.tower", [&] { (void)load_tower(c.tower_file); });
  }
  for (const auto& s : sections_of(c.suite)) {
    const bool missing = (s == "tree" && (c.tree_file.empty() || c.tree_mutant_file.empty())) ||
                         (s == "gap" && (c.pregap_file.empty() || c.pregap_single_file.empty()));
    if (missing) throw ConfigError("section '" + s + "' needs its fixture files");
  }
}

SuiteConfig load_config(const std::string& path) {
  const std::string text = read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  SuiteConfig c = config_from_json(j, fs::path(path).parent_path().string());
  if (const char* env = std::getenv("LAB_SEED"); env && *env) {
    try {
      c.seed = parse_nat(env, "LAB_SEED");
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
  }
  c.source = path;
  validate_config(c);
  return c;
}

// ---- reports

json Report::summary() const {
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const auto& r : records) ++counts[static_cast<int>(r.status)];
  return {{"records", records.size()},
          {"pass", counts[static_cast<int>(Status::pass)]},
          {"fail", counts[static_cast<int>(Status::fail)]},
          {"skipped", counts[static_cast<int>(Status::skipped)]},
          {"undecided", counts[static_cast<int>(Status::undecided)]}};
}

bool Report::any_fail() const {
  return std::any_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.status == Status::fail; });
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string millis_text(double ms) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << ms;
  return os.str();
}

}  // namespace

std::string emit_report(const Report& r, std::string_view format) {
  if (format == "json") {
    json j;
    j["version"] = r.version;
    j["config"] = r.config;
    j["records"] = json::array();
    for (const auto& rec : r.records) j["records"].push_back(to_json(rec));
    j["summary"] = r.summary();
    return j.dump(2) + "\n";
  }
  if (format == "csv") {
    std::string out = "id,anchor,status,checks,millis,counterexample,replay\n";
    for (const auto& rec : r.records) {
      out += csv_field(rec.id) + "," + csv_field(rec.anchor) + "," + std::string(to_string(rec.status)) + "," +
             std::to_string(rec.checks) + "," + millis_text(rec.millis) + "," +
             csv_field(rec.counterexample.is_null() ? std::string{} : rec.counterexample.dump()) + "," +
             csv_field(rec.replay) + "\n";
    }
    return out;
  }
  if (format == "text") {
    std::ostringstream os;
    if (r.config.contains("suite")) os << "suite " << r.config["suite"].get<std::string>() << "\n";
    for (const auto& rec : r.records) {
      std::string status(to_string(rec.status));
      std::transform(status.begin(), status.end(), status.begin(), [](unsigned char ch) { return std::toupper(ch); });
      os << status << "  " << rec.id << "  [" << rec.anchor << "]  " << rec.checks << " checks\n";
      if (rec.status == Status::fail) {
        os << "    counterexample: " << rec.counterexample.dump() << "\n";
        if (!rec.replay.empty()) os << "    replay: " << rec.replay << "\n";
      } else if (rec.details.contains("reason")) {
        os << "    " << rec.details["reason"].dump() << "\n";
      }
    }
    const json s = r.summary();
    os << s["records"] << " records: " << s["pass"] << " pass, " << s["fail"] << " fail, " << s["skipped"]
       << " skipped, " << s["undecided"] << " undecided\n";
    return os.str();
  }
  throw DomainError("unknown report format '" + std::string(format) + "'");
}

Report parse_report(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  Report r;
  try {
    r.version = j.at("version").get<int>();
    r.config = j.at("config");
    for (const auto& rec : j.at("records")) r.records.push_back(record_from_json(rec));
  } catch (const json::exception& e) {
    throw ParseError(std::string("report: ") + e.what());
  }
  return r;
}

json without_timing(const json& report) {
  json out = report;
  if (out.contains("records")) {
    for (auto& rec : out["records"]) rec.erase("timing_ms");
  }
  return out;
}

// ---- sections

namespace {

using Records = std::vector<CheckRecord>;

std::string q(const Ordinal& a) { return shell_quote(to_string(a)); }

std::string join(const std::vector<Ordinal>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + to_string(v[i]);
  return out;
}

void append(Records& out, const AxiomReport& r, const std::string& prefix) {
  for (auto rec : r.records) {
    rec.id = prefix + rec.id;
    out.push_back(std::move(rec));
  }
}

void finish(Records& out, CheckTally& t, Clock::time_point start) {
  auto rec = t.finish();
  rec.millis = ms_since(start);
  out.push_back(std::move(rec));
}

Records walks_section(const SuiteConfig& c) {
  Records out;
  std::mt19937_64 rng(c.seed);
  const Ordinal w = Ordinal::omega();
  std::vector<std::array<Ordinal, 3>> triples;
  while (triples.size() < c.triples) {
    std::array<Ordinal, 3> t{lab::random_cnf(rng, w, 4), lab::random_cnf(rng, w, 4), lab::random_cnf(rng, w, 4)};
    std::sort(t.begin(), t.end());
    if (t[0] < t[1] && t[1] < t[2]) triples.push_back(t);
  }
  WalkContext ctx;
  auto replay = [](const char* law, const std::array<Ordinal, 3>& t) {
    return std::string("ordlab walk check --law ") + law + " --alpha " + q(t[0]) + " --beta " + q(t[1]) + " --gamma " +
           q(t[2]);
  };
  auto triple_json = [](const std::array<Ordinal, 3>& t) {
    return json{{"alpha", to_string(t[0])}, {"beta", to_string(t[1])}, {"gamma", to_string(t[2])}};
  };

  struct Law {
    const char* id;
    const char* anchor;
    std::function<std::optional<json>(const std::array<Ordinal, 3>&)> check;
  };
  const std::vector<Law> laws{
      {"S1", "S1",
       [&](const auto& t) -> std::optional<json> {
         const Natural ac = ctx.rho(t[0], t[2]), ab = ctx.rho(t[0], t[1]), bc = ctx.rho(t[1], t[2]);
         if (ac <= std::max(ab, bc)) return std::nullopt;
         return json{{"rho_ac", ac}, {"rho_ab", ab}, {"rho_bc", bc}};
       }},
      {"S2", "S2",
       [&](const auto& t) -> std::optional<json> {
         const Natural ab = ctx.rho(t[0], t[1]), ac = ctx.rho(t[0], t[2]), bc = ctx.rho(t[1], t[2]);
         if (ab <= std::max(ac, bc)) return std::nullopt;
         return json{{"rho_ab", ab}, {"rho_ac", ac}, {"rho_bc", bc}};
       }},
      {"rho-ge-rho1", "rho-ge-rho1",
       [&](const auto& t) -> std::optional<json> {
         const Natural r = ctx.rho(t[0], t[1]), r1 = ctx.rho1(t[0], t[1]);
         if (r >= r1) return std::nullopt;
         return json{{"rho", r}, {"rho1", r1}};
       }},
      {"rhobar-injective", "rhobar-injective",
       [&](const auto& t) -> std::optional<json> {
         const Natural a = ctx.rho_bar(t[0], t[2]), b = ctx.rho_bar(t[1], t[2]);
         if (a != b) return std::nullopt;
         return json{{"rho_bar", a}};
       }},
      {"trace-length", "rho2-trace",
       [&](const auto& t) -> std::optional<json> {
         const Natural steps = walk_trace(t[0], t[2]).size() - 1;
         const Natural r2 = ctx.rho2(t[0], t[2]);
         if (steps == r2) return std::nullopt;
         return json{{"trace_steps", steps}, {"rho2", r2}};
       }},
  };
  for (const auto& law : laws) {
    const auto start = Clock::now();
    CheckTally tally(std::string("walks/") + law.id, law.anchor);
    for (const auto& t : triples) {
      if (auto cex = law.check(t)) {
        json j = triple_json(t);
        j.update(*cex);
        tally.violation(std::move(j), replay(law.id, t));
      } else {
        tally.ok();
      }
    }
    tally.details()["triples"] = triples.size();
    tally.details()["sample"] = "below w^w, exponents and coefficients <= 4";
    finish(out, tally, start);
  }
  return out;
}

Records sublevel_section(const SuiteConfig&) {
  Records out;
  WalkContext ctx;
  lab::LiteralWalks literal;
  for (auto fn : {WalkFn::rho, WalkFn::rho1}) {
    const auto start = Clock::now();
    CheckTally tally("sublevel/" + std::string(to_string(fn)), "sublevel-oracle");
    for (Natural j = 0; j < 3; ++j) {
      for (Natural n = 0; n <= 12; ++n) {
        const Ordinal alpha = add(Ordinal::omega_power(Ordinal::finite(1), j), Ordinal::finite(n));
        for (Natural cc = 0; cc <= 5; ++cc) {
          const auto fast = ctx.sublevel(fn, alpha, cc);
          const auto scan = lab::sublevel_scan(literal, fn, alpha, cc);
          if (fast != scan) {
            tally.violation({{"alpha", to_string(alpha)}, {"c", cc}, {"sublevel", ordinals_to_json(fast)},
                             {"scan", ordinals_to_json(scan)}},
                            "ordlab walk check --law sublevel --fn " + std::string(to_string(fn)) + " --alpha " +
                                q(alpha) + " --c " + std::to_string(cc));
          } else {
            tally.ok();
          }
        }
      }
    }
    tally.details()["alpha_below"] = "w*3";
    tally.details()["c_max"] = 5;
    finish(out, tally, start);
  }
  return out;
}

Records matrix_section(const SuiteConfig& c) {
  Records out;
  const auto universe = resolve_universe(c.universe, c.seed);
  const auto p = make_provider(c.provider, c.flip);
  append(out, verify_axioms(*p, universe, c.xi_max, c.seed), "matrix/");

  if (c.mutations == 0) return out;
  const auto start = Clock::now();
  CheckTally tally("matrix/mutation", "flip-detected");
  const auto base = make_provider(c.provider);
  std::vector<std::pair<Ordinal, Ordinal>> pairs;
  for (const auto& a : universe) {
    if (!base->in_index_set(a)) continue;
    for (const auto& g : universe) {
      if (g < a) pairs.emplace_back(g, a);
    }
  }
  std::mt19937_64 rng(c.seed ^ 0xf11bULL);
  json flips = json::array();
  for (std::size_t i = 0; i < c.mutations && !pairs.empty(); ++i) {
    const auto& [g, a] = pairs[rng() % pairs.size()];
    const Natural xi = lab::uniform(rng, 0, c.xi_max);
    const auto flipped = make_flipped(base, g, xi, a);
    const AxiomReport r = verify_axioms(*flipped, universe, c.xi_max, c.seed);
    json failing = json::array();
    for (const auto& rec : r.records) {
      if (rec.status == Status::fail) failing.push_back(rec.id);
    }
    const std::string flip = to_string(g) + "," + std::to_string(xi) + "," + to_string(a);
    flips.push_back({{"flip", flip}, {"detected_by", failing}});
    if (failing.empty()) {
      tally.violation({{"flip", flip}, {"reason", "no axiom check failed on the mutated provider"}},
                      "ordlab matrix verify " + flipped->replay_args() + " --universe " +
                          shell_quote(lab::universe_arg(c.universe)) + " --xi-max " + std::to_string(c.xi_max) +
                          " --seed " + std::to_string(c.seed));
    } else {
      tally.ok();
    }
  }
  tally.details()["flips"] = flips;
  finish(out, tally, start);
  return out;
}

Records group_section(const SuiteConfig& c) {
  Records out;
  const auto universe = resolve_universe(c.universe, c.seed);
  const auto p = make_provider(c.provider, c.flip);
  const auto base = lab::full_base(p, universe, c.xi_max);
  const auto elements = lab::sample_elements(c.seed, universe, c.group_elements);
  GroupVerifyOptions opts;
  opts.replay_prefix = "ordlab group check " + p->replay_args();
  append(out, verify_group_axioms(base, elements, c.seed, opts), "group/");

  const auto start = Clock::now();
  CheckTally tally("group/restriction-cover", "restriction-cover");
  std::vector<Ordinal> indices;
  for (const auto& a : universe) {
    if (p->in_index_set(a)) indices.push_back(a);
  }
  std::mt19937_64 rng(c.seed ^ 0xc0feULL);
  std::size_t unsupported = 0;
  for (std::size_t i = 0; i < c.restriction_triples && !indices.empty(); ++i) {
    const Ordinal delta = indices[rng() % indices.size()];
    const Ordinal alpha = indices[rng() % indices.size()];
    const Natural xi = lab::uniform(rng, 0, c.xi_max);
    try {
      const json cex = lab::restriction_case(*p, delta, xi, alpha, universe);
      if (cex.is_null()) {
        tally.ok();
      } else {
        tally.violation(cex, "ordlab group cover " + p->replay_args() + " --delta " + q(delta) + " --xi " +
                                 std::to_string(xi) + " --alpha " + q(alpha) + " --universe " +
                                 shell_quote(lab::universe_arg(c.universe)));
      }
    } catch (const Unsupported&) {
      ++unsupported;
    }
  }
  if (unsupported > 0) {
    tally.details()["unsupported"] = unsupported;
    if (unsupported == c.restriction_triples) tally.skip("provider lacks the witnesses restriction needs");
  }
  tally.details()["triples"] = c.restriction_triples;
  finish(out, tally, start);
  return out;
}

Records tree_section(const SuiteConfig& c) {
  Records out;
  const ExplicitTree t = load_tree(c.tree_file);
  const Natural xi = lab::tree_xi_bound(t, c.xi_max);
  const std::string replay = "ordlab tree verify --tree " + shell_quote(c.tree_file) + " --xi-max " + std::to_string(xi);
  append(out, verify_tree_matrix(t, t.levels(), xi, replay), "tree/fragment/");

  {
    const auto start = Clock::now();
    CheckTally tally("tree/mutant-uniqueness", "tree-unique-predecessor");
    const ExplicitTree m = load_tree(c.tree_mutant_file);
    const Natural mxi = lab::tree_xi_bound(m, c.xi_max);
    const std::string mreplay =
        "ordlab tree verify --tree " + shell_quote(c.tree_mutant_file) + " --xi-max " + std::to_string(mxi);
    const AxiomReport r = verify_tree_matrix(m, m.levels(), mxi, mreplay);
    const CheckRecord* g4 = r.find("G4");
    const bool rejected = g4 && g4->status == Status::fail && g4->counterexample.contains("predecessors") &&
                          g4->counterexample["predecessors"].size() >= 2;
    if (rejected) {
      tally.ok();
      tally.details()["mutant_counterexample"] = g4->counterexample;
      tally.details()["mutant_replay"] = g4->replay;
    } else {
      tally.violation({{"tree", c.tree_mutant_file},
                       {"G4", g4 ? json(std::string(to_string(g4->status))) : json(nullptr)},
                       {"reason", "mutant not rejected for a non-unique predecessor"}},
                      mreplay);
    }
    finish(out, tally, start);
  }

  {
    const auto start = Clock::now();
    CheckTally tally("tree/diagnostics", "tree-diagnostics");
    const auto chains = branch_check(t);
    const auto anti = antichain_check(t);
    tally.ok();
    tally.details()["chains"] = chains.chains.size();
    tally.details()["longest_chain"] = chains.longest;
    tally.details()["max_antichain"] = anti.max_antichain;
    tally.details()["antichain_witness"] = ordinals_to_json(anti.witness);
    json sizes = json::object();
    for (const auto& [level, n] : anti.level_sizes) sizes[to_string(level)] = n;
    tally.details()["level_sizes"] = sizes;
    tally.details()["issues"] = t.validate().size();
    finish(out, tally, start);
  }
  return out;
}

std::vector<FinSeqNode> linf_universe(std::uint64_t seed, std::size_t count, WalkContext& ctx) {
  std::mt19937_64 rng(seed ^ 0x11f7ULL);
  std::vector<FinSeqNode> nodes;
  std::set<std::vector<Natural>> seen;
  const auto betas = sample_ordinals(seed, Ordinal::finite(3), 4, 16);
  std::size_t tries = 0;
  while (nodes.size() < count && tries++ < count * 64) {
    FinSeqNode s;
    if (nodes.size() % 4 == 0 && !betas.empty()) {
      const Ordinal beta = betas[rng() % betas.size()];
      Natural cap = 8;
      if (beta.is_finite()) cap = std::min<Natural>(cap, beta.to_natural());
      s = gen_rho2_node(beta, lab::uniform(rng, 0, cap), ctx);
    } else {
      const Natural dom = lab::uniform(rng, 0, 8);
      for (Natural i = 0; i < dom; ++i) s.values.push_back(lab::uniform(rng, 0, 6));
    }
    if (seen.insert(s.values).second) nodes.push_back(std::move(s));
  }
  return nodes;
}

Records linf_section(const SuiteConfig& c) {
  Records out;
  WalkContext ctx;
  const auto universe = linf_universe(c.seed, c.linf_nodes, ctx);
  auto rec = verify_linf_witness(universe, 3);
  rec.id = "linf/witness";
  out.push_back(std::move(rec));

  const auto start = Clock::now();
  CheckTally tally("linf/rho2-fixtures", "rho2-node");
  const std::vector<std::tuple<const char*, Natural, std::vector<Natural>>> fixtures{
      {"3", 3, {3, 2, 1}},
      {"w", 3, {1, 1, 1}},
  };
  for (const auto& [beta, alpha, expected] : fixtures) {
    const FinSeqNode got = gen_rho2_node(parse_ordinal(beta), alpha, ctx);
    if (got.values != expected) {
      tally.violation({{"beta", beta}, {"alpha", alpha}, {"got", got.values}, {"expected", expected}},
                      "ordlab tree linf --op node --s " +
                          shell_quote("rho2 beta=" + std::string(beta) + " alpha=" + std::to_string(alpha)) +
                          " --expect " + shell_quote(to_string(FinSeqNode{expected, std::nullopt})));
    } else {
      tally.ok();
    }
  }
  finish(out, tally, start);
  return out;
}

std::vector<std::size_t> tower_lengths(std::size_t cap) {
  std::vector<std::size_t> out;
  for (std::size_t l : {2, 10, 25, 40}) {
    if (l <= cap) out.push_back(l);
  }
  if (cap > 0 && std::find(out.begin(), out.end(), cap) == out.end()) out.push_back(cap);
  std::sort(out.begin(), out.end());
  return out;
}

Records tower_section(const SuiteConfig& c) {
  Records out;
  const auto evens = residue_set(2, {0});
  json growth = json::object();
  const auto gstart = Clock::now();
  for (std::size_t len : tower_lengths(c.tower_length)) {
    const Tower t = lab::lab_tower(len, c.seed, evens);
    const std::string replay =
        "ordlab tower build --length " + std::to_string(len) + " --seed " + std::to_string(c.seed) + " --verify";
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "tower/length-%02zu/", len);
    append(out, validate_tower(t, replay), prefix);
    json counts = json::object();
    for (Natural n : {0, 1, 2, 4, 8}) counts[std::to_string(n)] = hausdorff_check(t, n, t.indices.back()).size();
    growth[std::to_string(len)] = {{"beta", to_string(t.indices.back())}, {"sizes", counts}};
  }
  {
    CheckTally tally("tower/hausdorff-growth", "hausdorff-tower");
    tally.ok();
    tally.details()["per_length"] = growth;
    tally.details()["note"] = "finite index families: counts only";
    finish(out, tally, gstart);
  }
  if (!c.tower_file.empty()) {
    append(out, validate_tower(load_tower(c.tower_file), "ordlab tower verify --manifest " + shell_quote(c.tower_file)),
           "tower/file/");
  }
  {
    // a_0 = evens, a_1 = w \ {0}.
    const auto start = Clock::now();
    CheckTally tally("tower/hausdorff-examples", "hausdorff-tower");
    const std::string fixture = data_file("tower_two.txt");
    const Tower t = load_tower(fixture);
    const Ordinal one = Ordinal::finite(1);
    const std::vector<std::tuple<Natural, Ordinal, std::vector<Ordinal>>> cases{
        {1, one, {Ordinal::finite(0)}}, {0, one, {}}, {3, Ordinal::finite(0), {}}};
    for (const auto& [n, beta, expected] : cases) {
      const auto got = hausdorff_check(t, n, beta);
      if (got != expected) {
        tally.violation({{"n", n}, {"beta", to_string(beta)}, {"got", ordinals_to_json(got)},
                         {"expected", ordinals_to_json(expected)}},
                        "ordlab tower hausdorff --manifest " + shell_quote(fixture) + " --n " + std::to_string(n) +
                            " --beta " + q(beta) + " --expect " + shell_quote("{" + join(expected) + "}"));
      } else {
        tally.ok();
      }
    }
    finish(out, tally, start);
  }
  return out;
}

Records gap_section(const SuiteConfig& c) {
  Records out;
  const PreGap mod4 = load_pregap(c.pregap_file);
  const PreGap single = load_pregap(c.pregap_single_file);
  append(out, validate_pregap(mod4, "ordlab gap verify --manifest " + shell_quote(c.pregap_file)), "gap/mod4/");
  append(out, validate_pregap(single, "ordlab gap verify --manifest " + shell_quote(c.pregap_single_file)),
         "gap/single/");

  {
    const auto start = Clock::now();
    CheckTally tally("gap/splitter-examples", "splitter");
    for (const auto& ex : lab::split_examples()) {
      const SplitResult r = splitter_check(parse_set(ex.c), mod4);
      const bool match = r.splits == ex.splits &&
                         (ex.splits || (r.index && to_string(*r.index) == ex.index && r.side == ex.side));
      if (match) {
        tally.ok();
      } else {
        tally.violation({{"c", ex.c},
                         {"splits", r.splits},
                         {"index", r.index ? json(to_string(*r.index)) : json(nullptr)},
                         {"side", r.side},
                         {"expected_splits", ex.splits},
                         {"expected_index", ex.index},
                         {"expected_side", ex.side}},
                        "ordlab gap split --manifest " + shell_quote(c.pregap_file) + " --c " + shell_quote(ex.c) +
                            " --expect " + shell_quote(ex.splits ? "splits" : "fails " + ex.index + " " + ex.side));
      }
    }
    finish(out, tally, start);
  }

  {
    const auto start = Clock::now();
    CheckTally tally("gap/member-examples", "gap-matrix");
    const Ordinal zero, one = Ordinal::finite(1);
    const std::vector<std::tuple<const PreGap*, const std::string*, Natural, bool>> cases{
        {&mod4, &c.pregap_file, 0, true}, {&single, &c.pregap_single_file, 2, false},
        {&single, &c.pregap_single_file, 3, true}};
    for (const auto& [g, file, xi, expected] : cases) {
      const bool got = gap_F_member(*g, zero, xi, one);
      if (got != expected) {
        tally.violation({{"manifest", *file}, {"alpha", "0"}, {"xi", xi}, {"beta", "1"}, {"got", got}},
                        "ordlab gap member --manifest " + shell_quote(*file) + " --alpha 0 --xi " +
                            std::to_string(xi) + " --beta 1 --expect " + (expected ? "true" : "false"));
      } else {
        tally.ok();
      }
    }
    bool rejected = false;
    try {
      (void)gap_F_member(mod4, one, 0, one);
    } catch (const DomainError&) {
      rejected = true;
    }
    if (rejected) {
      tally.ok();
    } else {
      tally.violation({{"alpha", "1"}, {"beta", "1"}, {"reason", "alpha = beta accepted"}},
                      "ordlab gap member --manifest " + shell_quote(c.pregap_file) + " --alpha 1 --xi 0 --beta 1");
    }
    finish(out, tally, start);
  }

  {
    const auto start = Clock::now();
    CheckTally tally("gap/hausdorff-growth", "hausdorff-gap");
    json growth = json::object();
    for (const auto& [name, g] : {std::pair{"mod4", &mod4}, std::pair{"single", &single}}) {
      json counts = json::object();
      for (Natural n : {0, 1, 2, 4, 8}) counts[std::to_string(n)] = hausdorff_check(*g, n, g->indices.back()).size();
      growth[name] = {{"beta", to_string(g->indices.back())}, {"sizes", counts}};
    }
    tally.ok();
    tally.details()["per_family"] = growth;
    tally.details()["note"] = "finite index families: counts only";
    finish(out, tally, start);
  }
  return out;
}

Records run_section(const std::string& name, const SuiteConfig& c) {
  try {
    if (name == "walks") return walks_section(c);
    if (name == "sublevel") return sublevel_section(c);
    if (name == "matrix") return matrix_section(c);
    if (name == "group") return group_section(c);
    if (name == "tree") return tree_section(c);
    if (name == "linf") return linf_section(c);
    if (name == "tower") return tower_section(c);
    if (name == "gap") return gap_section(c);
  } catch (const Error& e) {
    CheckTally tally(name + "/aborted", "section");
    tally.violation({{"section", name}, {"error", e.what()}},
                    c.source.empty() ? std::string{} : "ordlab lab run " + shell_quote(c.source));
    return {tally.finish()};
  }
  throw ConfigError("unknown section '" + name + "'");
}

}  // namespace

Report run_suite(const SuiteConfig& c) {
  validate_config(c);
  Report rep;
  rep.config = config_echo(c);
  const auto sections = sections_of(c.suite);
  std::vector<Records> results(sections.size());
  if (c.jobs <= 1) {
    for (std::size_t i = 0; i < sections.size(); ++i) results[i] = run_section(sections[i], c);
  } else {
    for (std::size_t first = 0; first < sections.size(); first += c.jobs) {
      std::vector<std::future<Records>> batch;
      const std::size_t last = std::min(sections.size(), first + c.jobs);
      for (std::size_t i = first; i < last; ++i) {
        batch.push_back(std::async(std::launch::async, [&, i] { return run_section(sections[i], c); }));
      }
      for (std::size_t i = first; i < last; ++i) results[i] = batch[i - first].get();
    }
  }
  for (auto& r : results) {
    for (auto& rec : r) rep.records.push_back(std::move(rec));
  }
  std::stable_sort(rep.records.begin(), rep.records.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
  return rep;
}

}  // namespace ordlab
