// Acceptance run: one PASS/FAIL line per criterion. The full builtin suite
// runs twice; criteria 1-8 read the first report, criterion 9 compares both.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "ordlab/lab.hpp"
#include "ordlab/tree.hpp"

using namespace ordlab;

namespace {

struct Outcome {
  bool ok = true;
  std::string note;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note += (note.empty() ? "" : "; ") + what;
    }
  }
};

const CheckRecord* find(const Report& r, const std::string& id) {
  for (const auto& rec : r.records) {
    if (rec.id == id) return &rec;
  }
  return nullptr;
}

bool passed(const Report& r, const std::string& id, std::uint64_t min_checks = 1) {
  const CheckRecord* rec = find(r, id);
  return rec && rec->status == Status::pass && rec->checks >= min_checks;
}

double section_ms(const Report& r, const std::string& prefix) {
  double ms = 0;
  for (const auto& rec : r.records) {
    if (rec.id.rfind(prefix, 0) == 0) ms += rec.millis;
  }
  return ms;
}

bool all_pass(const Report& r, const std::string& prefix, std::size_t* count = nullptr) {
  std::size_t n = 0;
  bool ok = true;
  for (const auto& rec : r.records) {
    if (rec.id.rfind(prefix, 0) != 0) continue;
    ++n;
    ok = ok && rec.status == Status::pass;
  }
  if (count) *count = n;
  return ok && n > 0;
}

std::string fmt_s(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", ms / 1000.0);
  return buf;
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  SuiteConfig cfg = load_config(std::string(ORDLAB_DATA_DIR) + "/configs/full.json");

  auto t0 = Clock::now();
  const Report first = run_suite(cfg);
  const double first_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  t0 = Clock::now();
  const Report second = run_suite(cfg);
  const double second_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();

  std::vector<std::pair<std::string, Outcome>> rows;

  {
    Outcome o;
    o.require(passed(first, "walks/S1", 10000), "S1 violations or too few triples");
    o.require(passed(first, "walks/S2", 10000), "S2 violations or too few triples");
    const double ms = section_ms(first, "walks/");
    o.require(ms < 60000, "walks section took " + fmt_s(ms));
    o.note = o.ok ? std::to_string(find(first, "walks/S1")->checks) + " triples below w^w, " + fmt_s(ms) : o.note;
    rows.emplace_back("1 subadditivity S1/S2", o);
  }
  {
    Outcome o;
    o.require(passed(first, "walks/rho-ge-rho1", 10000), "rho < rho1 found");
    if (o.ok) o.note = std::to_string(find(first, "walks/rho-ge-rho1")->checks) + " pairs";
    rows.emplace_back("2 rho >= rho1", o);
  }
  {
    Outcome o;
    o.require(passed(first, "sublevel/rho") && passed(first, "sublevel/rho1"), "sublevel sets differ from the scan");
    const double ms = section_ms(first, "sublevel/");
    o.require(ms < 10000, "sublevel section took " + fmt_s(ms));
    if (o.ok) o.note = "alpha < w*3, c <= 5, " + fmt_s(ms);
    rows.emplace_back("3 sublevel oracle", o);
  }
  {
    Outcome o;
    for (const char* id : {"matrix/G1", "matrix/G2", "matrix/G3", "matrix/G4"}) o.require(passed(first, id), std::string(id) + " not passing");
    o.require(passed(first, "matrix/mutation"), "a sampled flip went undetected");
    // One more flip, chosen by hand: 1 leaves F_3(w) although rho(1, w) = 1.
    const auto flipped = make_provider("rho", parse_flip("1,3,w"));
    o.require(verify_axioms(*flipped, mixed_universe(), 8, cfg.seed).any_fail(), "hand-picked flip not detected");
    if (o.ok) o.note = "mixed universe, xi <= 8; " + std::to_string(find(first, "matrix/mutation")->checks) + " sampled flips and 1 fixed flip detected";
    rows.emplace_back("4 matrix axioms + mutation", o);
  }
  {
    Outcome o;
    for (int i = 1; i <= 6; ++i) {
      const std::string id = "group/group-" + std::to_string(i);
      o.require(passed(first, id), id + " not passing");
    }
    const CheckRecord* g1 = find(first, "group/group-1");
    o.require(g1 && g1->details.value("elements", 0) >= 100, "fewer than 100 elements");
    o.require(passed(first, "group/restriction-cover", 50), "restriction cover failed or fewer than 50 triples");
    if (o.ok) o.note = std::to_string(g1->details["elements"].get<int>()) + " elements, 50 restriction triples";
    rows.emplace_back("5 group conditions (1)-(6)", o);
  }
  {
    Outcome o;
    std::size_t n = 0;
    o.require(all_pass(first, "tree/fragment/", &n) && n == 5, "fragment records not all passing");
    o.require(passed(first, "tree/mutant-uniqueness"), "mutant not rejected for uniqueness");
    const CheckRecord* linf = find(first, "linf/witness");
    o.require(linf && linf->status == Status::pass && linf->details.value("nodes", 0) == 200,
              "l-infinity witness failed or universe not 200 nodes");
    if (o.ok) o.note = "fragment passes, mutant G4 fails, 200-node l-infinity universe";
    rows.emplace_back("6 tree suites", o);
  }
  {
    Outcome o;
    WalkContext ctx;
    o.require(gen_rho2_node(Ordinal::finite(3), 3, ctx).values == std::vector<Natural>{3, 2, 1}, "(3,3) mismatch");
    o.require(gen_rho2_node(Ordinal::omega(), 3, ctx).values == std::vector<Natural>{1, 1, 1}, "(w,3) mismatch");
    o.require(passed(first, "linf/rho2-fixtures", 2), "suite fixture record not passing");
    if (o.ok) o.note = "(3,2,1) and (1,1,1)";
    rows.emplace_back("7 rho2 node fixtures", o);
  }
  {
    Outcome o;
    for (const char* len : {"02", "10", "25", "40"}) {
      std::size_t n = 0;
      o.require(all_pass(first, std::string("tower/length-") + len + "/", &n) && n == 4,
                std::string("tower of length ") + len + " not valid");
    }
    const CheckRecord* tr = find(first, "tower/length-40/tower-transitive");
    o.require(tr && tr->checks == 40 * 41 * 42 / 6, "transitivity not checked on all index triples");
    std::size_t n = 0;
    o.require(all_pass(first, "gap/mod4/", &n) && n == 5, "mod-4 pre-gap not valid");
    o.require(passed(first, "gap/mod4/pregap-cross-finite"), "cross containment fails");
    o.require(passed(first, "gap/splitter-examples", 3), "splitter outcomes differ");
    if (o.ok) o.note = "lengths 2/10/25/40 with a limit, " + std::to_string(tr->checks) + " triples, mod-4 pre-gap, 3 splitter cases";
    rows.emplace_back("8 tower and gap suites", o);
  }
  {
    Outcome o;
    const std::string a = without_timing(json::parse(emit_report(first, "json"))).dump();
    const std::string b = without_timing(json::parse(emit_report(second, "json"))).dump();
    o.require(a == b, "reports differ");
    o.require(first_ms < 300000 && second_ms < 300000, "full suite took " + fmt_s(std::max(first_ms, second_ms)));
    o.require(!first.any_fail(), "full suite has fail records");
    if (o.ok) {
      o.note = std::to_string(first.records.size()) + " records identical, runs " + fmt_s(first_ms) + " and " +
               fmt_s(second_ms);
    }
    rows.emplace_back("9 determinism of the full suite", o);
  }

  bool all = true;
  for (const auto& [name, o] : rows) {
    std::cout << (o.ok ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.note << "\n";
    all = all && o.ok;
  }
  return all ? 0 : 1;
}
