#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "internal.hpp"
#include "ordlab/error.hpp"

namespace ordlab {

namespace fs = std::filesystem;

namespace {

// Exit codes besides 0: a violation was found; usage, parse or config error.
constexpr int kFail = 1;
constexpr int kUsage = 2;

std::string join(const std::vector<Ordinal>& v, const char* sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + to_string(v[i]);
  return out;
}

Ordinal ordarg(const std::string& s, const char* name) {
  if (s.empty()) throw ParseError(std::string("--") + name + " is required");
  return parse_ordinal(s);
}

struct Ctx {
  std::ostream& out;
  std::ostream& err;
};

int verdict(Ctx& io, const std::optional<json>& cex) {
  if (!cex) {
    io.out << "pass\n";
    return 0;
  }
  io.out << "fail " << cex->dump() << "\n";
  return kFail;
}

int emit(Ctx& io, const Report& r, const std::string& format, const std::string& out_file) {
  const std::string text = emit_report(r, format);
  if (out_file.empty()) {
    io.out << text;
  } else {
    std::ofstream f(out_file);
    if (!f) throw ConfigError("cannot write '" + out_file + "'");
    f << text;
    const json s = r.summary();
    io.out << "wrote " << out_file << ": " << s["pass"] << " pass, " << s["fail"] << " fail, " << s["skipped"]
           << " skipped, " << s["undecided"] << " undecided\n";
  }
  return r.any_fail() ? kFail : 0;
}

/// Prints an answer; with --expect, a different answer is a violation.
int answer(Ctx& io, const std::string& expect, const std::string& got, bool matches) {
  io.out << got << "\n";
  if (expect.empty() || matches) return 0;
  return verdict(io, json{{"expected", expect}, {"got", got}});
}

int answer(Ctx& io, const std::string& expect, const std::string& got) { return answer(io, expect, got, got == expect); }

std::vector<GroupElement> read_elements(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::vector<GroupElement> seq;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t\r")] == '#') continue;
    seq.push_back(parse_group_element(line));
  }
  return seq;
}

/// Options shared by the subcommands; each leaf reads what it declares.
struct Opts {
  std::string fn = "rho", law, alpha, beta, gamma, c;
  std::string provider = "rho", flip, universe = "mixed", axiom;
  Natural xi = 0, eta = 0, xi_max = 8, search_bound = 1024, seed = 1, n = 0, m = 0;
  std::size_t elements = 120;
  std::string condition, nbhd, nbhd2, a, b, seq, delta;
  std::string tree, op, s, t, u;
  std::string expr, member_of, manifest, base = "(mod 2 0)";
  std::size_t length = 2;
  bool verify = false;
  std::string config, out, format = "json", lab_format, expect;
  std::size_t jobs = 0;
  bool xi_max_set = false;
};

std::optional<Flip> flip_of(const Opts& o) {
  if (o.flip.empty()) return std::nullopt;
  return parse_flip(o.flip);
}

json provider_echo(const Opts& o, const char* command) {
  return {{"command", command},   {"provider", o.provider}, {"flip", o.flip.empty() ? json(nullptr) : json(o.flip)},
          {"universe", o.universe}, {"xi_max", o.xi_max},    {"seed", o.seed}};
}

// ---- walk

int walk_eval(Ctx& io, const Opts& o) {
  WalkContext ctx;
  io.out << ctx.eval(parse_walk_fn(o.fn), ordarg(o.alpha, "alpha"), ordarg(o.beta, "beta")) << "\n";
  return 0;
}

int walk_sublevel(Ctx& io, const Opts& o) {
  WalkContext ctx;
  io.out << join(ctx.sublevel(parse_walk_fn(o.fn), ordarg(o.alpha, "alpha"), std::stoull(o.c.empty() ? "0" : o.c)))
         << "\n";
  return 0;
}

int walk_trace_cmd(Ctx& io, const Opts& o) {
  const Ordinal a = ordarg(o.alpha, "alpha"), b = ordarg(o.beta, "beta");
  if (a > b) throw DomainError("walk trace needs alpha <= beta");
  io.out << join(walk_trace(a, b), " > ") << "\n";
  return 0;
}

int walk_check(Ctx& io, const Opts& o) {
  WalkContext ctx;
  if (o.law == "sublevel") {
    const WalkFn fn = parse_walk_fn(o.fn);
    const Ordinal a = ordarg(o.alpha, "alpha");
    const Natural c = std::stoull(o.c.empty() ? "0" : o.c);
    lab::LiteralWalks literal;
    const auto fast = ctx.sublevel(fn, a, c);
    const auto scan = lab::sublevel_scan(literal, fn, a, c);
    if (fast == scan) return verdict(io, std::nullopt);
    return verdict(io, json{{"sublevel", ordinals_to_json(fast)}, {"scan", ordinals_to_json(scan)}});
  }
  const Ordinal a = ordarg(o.alpha, "alpha"), b = ordarg(o.beta, "beta");
  if (o.law == "rho-ge-rho1") {
    if (a > b) throw DomainError("rho-ge-rho1 needs alpha <= beta");
    const Natural r = ctx.rho(a, b), r1 = ctx.rho1(a, b);
    return verdict(io, r >= r1 ? std::nullopt : std::optional<json>(json{{"rho", r}, {"rho1", r1}}));
  }
  const Ordinal g = ordarg(o.gamma, "gamma");
  if (!(a <= b && b <= g)) throw DomainError("the law needs alpha <= beta <= gamma");
  if (o.law == "S1") {
    const Natural ac = ctx.rho(a, g), ab = ctx.rho(a, b), bc = ctx.rho(b, g);
    if (ac <= std::max(ab, bc)) return verdict(io, std::nullopt);
    return verdict(io, json{{"rho_ac", ac}, {"rho_ab", ab}, {"rho_bc", bc}});
  }
  if (o.law == "S2") {
    const Natural ab = ctx.rho(a, b), ac = ctx.rho(a, g), bc = ctx.rho(b, g);
    if (ab <= std::max(ac, bc)) return verdict(io, std::nullopt);
    return verdict(io, json{{"rho_ab", ab}, {"rho_ac", ac}, {"rho_bc", bc}});
  }
  if (o.law == "rhobar-injective") {
    if (a == b) throw DomainError("rhobar-injective needs alpha < beta");
    const Natural x = ctx.rho_bar(a, g), y = ctx.rho_bar(b, g);
    return verdict(io, x != y ? std::nullopt : std::optional<json>(json{{"rho_bar", x}}));
  }
  if (o.law == "trace-length") {
    const Natural steps = walk_trace(a, g).size() - 1, r2 = ctx.rho2(a, g);
    return verdict(io, steps == r2 ? std::nullopt : std::optional<json>(json{{"trace_steps", steps}, {"rho2", r2}}));
  }
  throw ParseError("unknown law '" + o.law + "'");
}

// ---- matrix

int matrix_verify(Ctx& io, const Opts& o) {
  const auto p = make_provider(o.provider, flip_of(o));
  const auto universe = resolve_universe(parse_universe_arg(o.universe), o.seed);
  MatrixVerifyOptions mo;
  mo.search_bound = o.search_bound;
  const AxiomReport r = verify_axioms(*p, universe, o.xi_max, o.seed, mo);
  return emit(io, lab::command_report(provider_echo(o, "matrix verify"), r), o.format, o.out);
}

int matrix_check(Ctx& io, const Opts& o) {
  const auto p = make_provider(o.provider, flip_of(o));
  const Ordinal g = ordarg(o.gamma, "gamma");
  if (o.axiom == "G1") return verdict(io, check_g1(*p, g, ordarg(o.alpha, "alpha"), o.xi_max, o.search_bound));
  if (o.axiom == "G2") return verdict(io, check_g2(*p, g, o.xi, ordarg(o.alpha, "alpha")));
  if (o.axiom == "G3") return verdict(io, check_g3(*p, g, o.xi, ordarg(o.alpha, "alpha"), ordarg(o.beta, "beta")));
  if (o.axiom == "G4") return verdict(io, check_g4(*p, g, o.eta, ordarg(o.alpha, "alpha"), ordarg(o.beta, "beta")));
  if (o.axiom == "directed") {
    return verdict(io, check_directed(*p, g, o.xi, ordarg(o.alpha, "alpha"), o.eta, ordarg(o.beta, "beta")));
  }
  throw ParseError("unknown axiom '" + o.axiom + "'");
}

int matrix_enumerate_check(Ctx& io, const Opts& o) {
  const auto p = make_provider(o.provider, flip_of(o));
  return verdict(io, check_enumerate(*p, o.xi, ordarg(o.alpha, "alpha")));
}

int matrix_member(Ctx& io, const Opts& o) {
  const auto p = make_provider(o.provider, flip_of(o));
  io.out << (p->member(ordarg(o.gamma, "gamma"), o.xi, ordarg(o.alpha, "alpha")) ? "true" : "false") << "\n";
  return 0;
}

// ---- group

int group_verify(Ctx& io, const Opts& o) {
  const auto p = make_provider(o.provider, flip_of(o));
  const auto universe = resolve_universe(parse_universe_arg(o.universe), o.seed);
  GroupVerifyOptions go;
  go.replay_prefix = "ordlab group check " + p->replay_args();
  const AxiomReport r = verify_group_axioms(lab::full_base(p, universe, o.xi_max),
                                            lab::sample_elements(o.seed, universe, o.elements), o.seed, go);
  json echo = provider_echo(o, "group verify");
  echo["elements"] = o.elements;
  return emit(io, lab::command_report(echo, r), o.format, o.out);
}

int group_check(Ctx& io, const Opts& o) {
  const auto p = make_provider(o.provider, flip_of(o));
  auto element = [](const std::string& s, const char* name) {
    if (s.empty()) throw ParseError(std::string("--") + name + " is required");
    return parse_group_element(s);
  };
  auto nbhd = [&](const std::string& s, const char* name) {
    if (s.empty()) throw ParseError(std::string("--") + name + " is required");
    return parse_nbhd(s, p);
  };
  const std::string& cond = o.condition;
  if (cond == "1" || cond == "3") {
    const Neighborhood u = nbhd(o.nbhd, "nbhd");
    const GroupElement a = element(o.a, "a"), b = element(o.b, "b");
    if (!in_neighborhood(a, u) || !in_neighborhood(b, u)) {
      io.out << "not applicable: a or b lies outside " << describe(u) << "\n";
      return 0;
    }
    const GroupElement d = sym_diff(a, b);
    if (in_neighborhood(d, u)) return verdict(io, std::nullopt);
    return verdict(io, json{{"nbhd", describe(u)}, {"sym_diff", to_string(d)}});
  }
  if (cond == "2") {
    const GroupElement a = element(o.a, "a");
    return verdict(io, sym_diff(a, a).empty() ? std::nullopt : std::optional<json>(json{{"a", to_string(a)}}));
  }
  if (cond == "4") {
    const GroupElement x = element(o.a, "a"), a = element(o.b, "b");
    const bool ok = sym_diff(x, a) == sym_diff(a, x) && sym_diff(sym_diff(x, a), x) == a;
    return verdict(io, ok ? std::nullopt : std::optional<json>(json{{"x", to_string(x)}, {"a", to_string(a)}}));
  }
  if (cond == "5") {
    const Neighborhood u = nbhd(o.nbhd, "nbhd"), v = nbhd(o.nbhd2, "nbhd2");
    const GroupElement a = element(o.a, "a");
    const auto w = meet_witness(u, v);
    if (!w) throw Unsupported("no (G3) witness for this pair");
    const bool ok = !in_neighborhood(a, *w) || (in_neighborhood(a, u) && in_neighborhood(a, v));
    return verdict(io, ok ? std::nullopt : std::optional<json>(json{{"W", describe(*w)}, {"a", to_string(a)}}));
  }
  if (cond == "6") {
    const GroupElement a = element(o.a, "a");
    if (a.empty()) throw DomainError("condition 6 needs a nonempty element");
    const Ordinal alpha = add(a.elems().back(), Ordinal::finite(1));
    if (!p->in_index_set(alpha)) throw Unsupported("no index above " + to_string(a));
    for (const auto& x : a.elems()) {
      try {
        const Natural xi = rho_F(*p, x, alpha, o.search_bound);
        if (!in_neighborhood(a, BasicNbhd{xi, alpha, p})) {
          io.out << "pass: U_" << xi << "(" << to_string(alpha) << ") excludes " << to_string(a) << "\n";
          return 0;
        }
      } catch (const NotFoundWithinBound&) {
      }
    }
    return verdict(io, json{{"a", to_string(a)}, {"alpha", to_string(alpha)}, {"reason", "no separating U"}});
  }
  if (cond == "member") {
    const Neighborhood u = nbhd(o.nbhd, "nbhd");
    const GroupElement a = element(o.a, "a");
    return verdict(io, in_neighborhood(a, u) ? std::nullopt
                                             : std::optional<json>(json{{"nbhd", describe(u)}, {"a", to_string(a)}}));
  }
  throw ParseError("unknown condition '" + cond + "'");
}

int group_converge(Ctx& io, const Opts& o) {
  const auto p = make_provider(o.provider, flip_of(o));
  if (o.seq.empty()) throw ParseError("--seq is required");
  const auto r = converges(read_elements(o.seq), parse_nbhd(o.nbhd, p));
  if (const auto* t = std::get_if<TailIndex>(&r)) {
    io.out << "converges from index " << t->index << "\n";
  } else {
    std::string list;
    for (auto i : std::get<Counterexample>(r).indices) list += (list.empty() ? "" : ",") + std::to_string(i);
    io.out << "outside at indices " << list << "\n";
  }
  return 0;
}

int group_cover(Ctx& io, const Opts& o) {
  const auto p = make_provider(o.provider, flip_of(o));
  const auto universe = resolve_universe(parse_universe_arg(o.universe), o.seed);
  Natural eta = 0;
  const json cex = lab::restriction_case(*p, ordarg(o.delta, "delta"), o.xi, ordarg(o.alpha, "alpha"), universe, &eta);
  if (cex.is_null()) {
    io.out << "eta " << eta << "\n";
    return 0;
  }
  return verdict(io, cex);
}

// ---- tree

int tree_verify(Ctx& io, const Opts& o) {
  if (o.tree.empty()) throw ParseError("--tree is required");
  const ExplicitTree t = load_tree(o.tree);
  const Natural xi = o.xi_max_set ? o.xi_max : lab::tree_xi_bound(t, o.xi_max);
  const AxiomReport r = verify_tree_matrix(
      t, t.levels(), xi, "ordlab tree verify --tree " + shell_quote(o.tree) + " --xi-max " + std::to_string(xi));
  return emit(io, lab::command_report({{"command", "tree verify"}, {"tree", o.tree}, {"xi_max", xi}}, r), o.format,
              o.out);
}

int tree_linf(Ctx& io, const Opts& o) {
  WalkContext ctx;
  auto node = [&](const std::string& s, const char* name) {
    if (s.empty()) throw ParseError(std::string("--") + name + " is required");
    return parse_finseq(s, ctx);
  };
  if (o.op == "node") return answer(io, o.expect, to_string(node(o.s, "s")));
  const FinSeqNode s = node(o.s, "s"), t = node(o.t, "t");
  if (o.op == "norm") {
    io.out << norm_diff(s, t) << "\n";
    return 0;
  }
  if (o.op == "member") {
    io.out << (linf_F_member(s, t, o.n) ? "true" : "false") << "\n";
    return 0;
  }
  if (o.op == "witness") {
    const FinSeqNode u = node(o.u, "u");
    const Natural k = linf_witness_k(s, t, o.m, o.n);
    const bool in_s = linf_F_member(u, s, o.m), in_t = linf_F_member(u, t, o.n), in_k = linf_F_member(u, t, k);
    if ((in_s || in_t) && !in_k) {
      return verdict(io, json{{"k", k}, {"in_F_m(s)", in_s}, {"in_F_n(t)", in_t}, {"in_F_k(t)", in_k}});
    }
    io.out << "pass k=" << k << "\n";
    return 0;
  }
  throw ParseError("unknown op '" + o.op + "'");
}

// ---- sets, towers, gaps

int sets_eval(Ctx& io, const Opts& o) {
  if (o.expr.empty()) throw ParseError("--expr is required");
  const SetExpr e = parse_set(o.expr);
  if (!o.member_of.empty()) {
    io.out << (member(e, std::stoull(o.member_of)) ? "true" : "false") << "\n";
    return 0;
  }
  io.out << "expr " << to_string(e) << "\n";
  if (auto ep = to_ep(e)) {
    io.out << "normal " << to_string(ep_set(*ep)) << "\n";
  } else {
    io.out << "normal undecided\n";
  }
  const Finiteness f = finiteness(e);
  switch (f.kind) {
    case Finiteness::Kind::finite: {
      std::string list;
      for (auto x : f.elements) list += (list.empty() ? "" : ",") + std::to_string(x);
      io.out << "finite {" << list << "}\n";
      break;
    }
    case Finiteness::Kind::infinite:
      io.out << "infinite\n";
      break;
    case Finiteness::Kind::undecided:
      io.out << "undecided: " << f.hits << " members below " << f.scanned << " (" << f.reason << ")\n";
      break;
  }
  return 0;
}

const std::string& need_manifest(const Opts& o) {
  if (o.manifest.empty()) throw ParseError("--manifest is required");
  return o.manifest;
}

int tower_build_cmd(Ctx& io, const Opts& o) {
  const Tower t = lab::lab_tower(o.length, o.seed, parse_set(o.base));
  if (!o.verify) {
    io.out << to_manifest(t);
    return 0;
  }
  const AxiomReport r = validate_tower(t, "ordlab tower build --length " + std::to_string(o.length) + " --seed " +
                                              std::to_string(o.seed) + " --verify");
  return emit(io,
              lab::command_report({{"command", "tower build"}, {"length", o.length}, {"seed", o.seed}, {"base", o.base}}, r),
              o.format, o.out);
}

int tower_verify_cmd(Ctx& io, const Opts& o) {
  const std::string& file = need_manifest(o);
  const AxiomReport r = validate_tower(load_tower(file), "ordlab tower verify --manifest " + shell_quote(file));
  return emit(io, lab::command_report({{"command", "tower verify"}, {"manifest", file}}, r), o.format, o.out);
}

int tower_rho_cmd(Ctx& io, const Opts& o) {
  const Tower t = load_tower(need_manifest(o));
  io.out << rho_TO(t, ordarg(o.alpha, "alpha"), ordarg(o.beta, "beta")) << "\n";
  return 0;
}

int tower_hausdorff_cmd(Ctx& io, const Opts& o) {
  const Tower t = load_tower(need_manifest(o));
  return answer(io, o.expect, "{" + join(hausdorff_check(t, o.n, ordarg(o.beta, "beta"))) + "}");
}

int gap_verify_cmd(Ctx& io, const Opts& o) {
  const std::string& file = need_manifest(o);
  const AxiomReport r = validate_pregap(load_pregap(file), "ordlab gap verify --manifest " + shell_quote(file));
  return emit(io, lab::command_report({{"command", "gap verify"}, {"manifest", file}}, r), o.format, o.out);
}

int gap_split_cmd(Ctx& io, const Opts& o) {
  const PreGap g = load_pregap(need_manifest(o));
  if (o.c.empty()) throw ParseError("--c is required");
  const SplitResult r = splitter_check(parse_set(o.c), g);
  std::string got;
  if (r.splits) {
    got = "splits";
    for (const auto& [alpha, xi] : r.least_xi) got += " " + to_string(alpha) + ":" + std::to_string(xi);
  } else {
    got = "fails " + to_string(*r.index) + " " + r.side;
  }
  // "--expect splits" ignores the per-index xi list.
  return answer(io, o.expect, got, got == o.expect || (o.expect == "splits" && r.splits));
}

int gap_hausdorff_cmd(Ctx& io, const Opts& o) {
  const PreGap g = load_pregap(need_manifest(o));
  io.out << "{" << join(hausdorff_check(g, o.n, ordarg(o.beta, "beta"))) << "}\n";
  return 0;
}

int gap_member_cmd(Ctx& io, const Opts& o) {
  const PreGap g = load_pregap(need_manifest(o));
  return answer(io, o.expect, gap_F_member(g, ordarg(o.alpha, "alpha"), o.xi, ordarg(o.beta, "beta")) ? "true" : "false");
}

// ---- lab

int lab_run(Ctx& io, const Opts& o) {
  SuiteConfig c = load_config(o.config);
  if (!o.out.empty()) c.out_dir = o.out;
  if (!o.lab_format.empty()) c.format = o.lab_format;
  if (o.jobs > 0) c.jobs = o.jobs;
  validate_config(c);
  const Report r = run_suite(c);
  if (c.out_dir.empty()) {
    io.out << emit_report(r, c.format);
  } else {
    fs::create_directories(c.out_dir);
    const char* ext = c.format == "text" ? "txt" : c.format.c_str();
    return emit(io, r, c.format, (fs::path(c.out_dir) / (std::string("report.") + ext)).string());
  }
  return r.any_fail() ? kFail : 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"ordlab: walks on ordinals, matrices and the structures they induce", "ordlab"};
  app.require_subcommand(1);
  Opts o;
  Ctx io{out, err};
  std::vector<std::pair<CLI::App*, std::function<int(Ctx&, const Opts&)>>> leaves;
  auto leaf = [&](CLI::App* parent, const char* name, const char* help, std::function<int(Ctx&, const Opts&)> fn) {
    CLI::App* sub = parent->add_subcommand(name, help);
    leaves.emplace_back(sub, std::move(fn));
    return sub;
  };
  auto provider_opts = [&](CLI::App* sub) {
    sub->add_option("--provider", o.provider, "rho | rho1 | tower:<file> | tree:<file> | gap:<file>");
    sub->add_option("--flip", o.flip, "invert one membership: 'gamma,xi,alpha'");
  };
  auto report_opts = [&](CLI::App* sub) {
    sub->add_option("--out", o.out, "write the report to this file");
    sub->add_option("--format", o.format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  };

  CLI::App* walk = app.add_subcommand("walk", "walk characteristics")->require_subcommand(1);
  {
    auto* s = leaf(walk, "eval", "evaluate rho, rho1, rho2 or rhobar", walk_eval);
    s->add_option("--fn", o.fn)->check(CLI::IsMember({"rho", "rho1", "rho2", "rhobar"}));
    s->add_option("--alpha", o.alpha)->required();
    s->add_option("--beta", o.beta)->required();
    s = leaf(walk, "sublevel", "{x <= alpha : f(x, alpha) <= c}", walk_sublevel);
    s->add_option("--fn", o.fn)->check(CLI::IsMember({"rho", "rho1"}));
    s->add_option("--alpha", o.alpha)->required();
    s->add_option("--c", o.c)->required();
    s = leaf(walk, "trace", "the walk from beta down to alpha", walk_trace_cmd);
    s->add_option("--alpha", o.alpha)->required();
    s->add_option("--beta", o.beta)->required();
    s = leaf(walk, "check", "check one law on one instance", walk_check);
    s->add_option("--law", o.law, "S1 | S2 | rho-ge-rho1 | rhobar-injective | trace-length | sublevel")->required();
    s->add_option("--fn", o.fn);
    s->add_option("--alpha", o.alpha)->required();
    s->add_option("--beta", o.beta);
    s->add_option("--gamma", o.gamma);
    s->add_option("--c", o.c);
  }

  CLI::App* matrix = app.add_subcommand("matrix", "matrix providers and axioms")->require_subcommand(1);
  {
    auto* s = leaf(matrix, "verify", "check G1-G4 over a universe", matrix_verify);
    provider_opts(s);
    report_opts(s);
    s->add_option("--universe", o.universe, "mixed | random:<exp>:<coef>:<count> | file");
    s->add_option("--xi-max", o.xi_max);
    s->add_option("--seed", o.seed);
    s->add_option("--search-bound", o.search_bound);
    s = leaf(matrix, "check", "check one axiom instance", [](Ctx& io, const Opts& o) {
      return o.axiom == "enumerate" ? matrix_enumerate_check(io, o) : matrix_check(io, o);
    });
    provider_opts(s);
    s->add_option("--axiom", o.axiom, "G1 | G2 | G3 | G4 | directed | enumerate")->required();
    s->add_option("--gamma", o.gamma);
    s->add_option("--alpha", o.alpha);
    s->add_option("--beta", o.beta);
    s->add_option("--xi", o.xi);
    s->add_option("--eta", o.eta);
    s->add_option("--xi-max", o.xi_max);
    s->add_option("--search-bound", o.search_bound);
    s = leaf(matrix, "member", "gamma in F_xi(alpha)", matrix_member);
    provider_opts(s);
    s->add_option("--gamma", o.gamma)->required();
    s->add_option("--xi", o.xi)->required();
    s->add_option("--alpha", o.alpha)->required();
  }

  CLI::App* group = app.add_subcommand("group", "neighborhoods of the identity")->require_subcommand(1);
  {
    auto* s = leaf(group, "verify", "conditions (1)-(6) on sampled elements", group_verify);
    provider_opts(s);
    report_opts(s);
    s->add_option("--universe", o.universe);
    s->add_option("--xi-max", o.xi_max);
    s->add_option("--elements", o.elements);
    s->add_option("--seed", o.seed);
    s = leaf(group, "check", "check one condition instance", group_check);
    provider_opts(s);
    s->add_option("--condition", o.condition, "1..6 | member")->required();
    s->add_option("--nbhd", o.nbhd, "'xi,alpha' or 'xi,alpha;xi,alpha'");
    s->add_option("--nbhd2", o.nbhd2);
    s->add_option("--a", o.a);
    s->add_option("--b", o.b);
    s->add_option("--search-bound", o.search_bound);
    s = leaf(group, "converge", "tail of a sequence inside a neighborhood", group_converge);
    provider_opts(s);
    s->add_option("--seq", o.seq, "one finite set per line")->required();
    s->add_option("--nbhd", o.nbhd)->required();
    s = leaf(group, "cover", "restriction cover for (delta, xi, alpha)", group_cover);
    provider_opts(s);
    s->add_option("--delta", o.delta)->required();
    s->add_option("--xi", o.xi)->required();
    s->add_option("--alpha", o.alpha)->required();
    s->add_option("--universe", o.universe);
    s->add_option("--seed", o.seed);
  }

  CLI::App* tree = app.add_subcommand("tree", "tree fragments and l-infinity nodes")->require_subcommand(1);
  {
    auto* s = leaf(tree, "verify", "tree order and G1-G4 on a fragment", tree_verify);
    report_opts(s);
    s->add_option("--tree", o.tree)->required();
    s->add_option("--xi-max", o.xi_max)->each([&](const std::string&) { o.xi_max_set = true; });
    s = leaf(tree, "linf", "l-infinity calculus", tree_linf);
    s->add_option("--op", o.op)->required()->check(CLI::IsMember({"norm", "member", "witness", "node"}));
    s->add_option("--expect", o.expect, "with --op node: the expected node");
    s->add_option("--s", o.s);
    s->add_option("--t", o.t);
    s->add_option("--u", o.u);
    s->add_option("--m", o.m);
    s->add_option("--n", o.n);
  }

  CLI::App* sets = app.add_subcommand("sets", "decidable subsets of w")->require_subcommand(1);
  {
    auto* s = leaf(sets, "eval", "normal form and finiteness", sets_eval);
    s->add_option("--expr", o.expr)->required();
    s->add_option("--member", o.member_of, "test one natural");
  }

  CLI::App* tower = app.add_subcommand("tower", "towers")->require_subcommand(1);
  {
    auto* s = leaf(tower, "build", "build a tower with one limit stage", tower_build_cmd);
    report_opts(s);
    s->add_option("--length", o.length);
    s->add_option("--seed", o.seed);
    s->add_option("--base", o.base);
    s->add_flag("--verify", o.verify);
    s = leaf(tower, "verify", "validate a tower manifest", tower_verify_cmd);
    report_opts(s);
    s->add_option("--manifest", o.manifest)->required();
    s = leaf(tower, "rho", "rho_TO(alpha, beta)", tower_rho_cmd);
    s->add_option("--manifest", o.manifest)->required();
    s->add_option("--alpha", o.alpha)->required();
    s->add_option("--beta", o.beta)->required();
    s = leaf(tower, "hausdorff", "{alpha < beta : a_alpha \\ a_beta within n}", tower_hausdorff_cmd);
    s->add_option("--expect", o.expect, "expected set, e.g. '{0}'");
    s->add_option("--manifest", o.manifest)->required();
    s->add_option("--n", o.n)->required();
    s->add_option("--beta", o.beta)->required();
  }

  CLI::App* gap = app.add_subcommand("gap", "pre-gaps")->require_subcommand(1);
  {
    auto* s = leaf(gap, "verify", "validate a pre-gap manifest", gap_verify_cmd);
    report_opts(s);
    s->add_option("--manifest", o.manifest)->required();
    s = leaf(gap, "split", "does c split the pre-gap", gap_split_cmd);
    s->add_option("--expect", o.expect, "'splits' or 'fails <index> <side>'");
    s->add_option("--manifest", o.manifest)->required();
    s->add_option("--c", o.c)->required();
    s = leaf(gap, "hausdorff", "{alpha < beta : a_alpha ∩ b_beta within n}", gap_hausdorff_cmd);
    s->add_option("--manifest", o.manifest)->required();
    s->add_option("--n", o.n)->required();
    s->add_option("--beta", o.beta)->required();
    s = leaf(gap, "member", "alpha in F^G_xi(beta)", gap_member_cmd);
    s->add_option("--expect", o.expect, "true | false");
    s->add_option("--manifest", o.manifest)->required();
    s->add_option("--alpha", o.alpha)->required();
    s->add_option("--xi", o.xi)->required();
    s->add_option("--beta", o.beta)->required();
  }

  CLI::App* labc = app.add_subcommand("lab", "config-driven suites")->require_subcommand(1);
  {
    auto* s = leaf(labc, "run", "run a suite config", lab_run);
    s->add_option("config", o.config)->required();
    s->add_option("--out", o.out, "report directory");
    s->add_option("--format", o.lab_format)->check(CLI::IsMember({"json", "csv", "text"}));
    s->add_option("--jobs", o.jobs);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    for (auto& [sub, fn] : leaves) {
      if (sub->parsed()) return fn(io, o);
    }
  } catch (const std::invalid_argument& e) {
    err << "error: bad number: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace ordlab
