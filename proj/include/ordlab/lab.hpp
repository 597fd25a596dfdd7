#pragma once

// Config-driven suite runs, reports, and the command-line front end.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ordlab/matrix.hpp"
#include "ordlab/report.hpp"

namespace ordlab {

/// Ordinals in CNF with exponents drawn below `exponent_bound` and
/// coefficients in [1, coefficient_bound]; deduplicated and sorted, so the
/// result may hold fewer than `count` elements only when the space is small.
std::vector<Ordinal> sample_ordinals(std::uint64_t seed, const Ordinal& exponent_bound, Natural coefficient_bound,
                                     std::size_t count);

/// 0..29 together with w, w+1, w*2, w^2, w^w.
std::vector<Ordinal> mixed_universe();

struct UniverseSpec {
  enum class Kind { mixed, list, random };
  Kind kind = Kind::mixed;
  std::vector<Ordinal> list;
  Ordinal exponent_bound = Ordinal::omega();
  Natural coefficient_bound = 5;
  std::size_t count = 40;
  /// The argument this universe was parsed from, echoed in reports and replays.
  std::string source = "mixed";
};

/// "mixed", "random:<exp bound>:<coef bound>:<count>", or a file with one
/// ordinal per line.
UniverseSpec parse_universe_arg(const std::string& text);
std::vector<Ordinal> resolve_universe(const UniverseSpec& u, std::uint64_t seed);

struct Flip {
  Ordinal gamma;
  Natural xi = 0;
  Ordinal alpha;
};
/// "gamma,xi,alpha".
Flip parse_flip(std::string_view text);

/// "rho", "rho1", "tower:<file>", "tree:<file>" or "gap:<file>"; the flip,
/// when present, inverts one membership.
ProviderPtr make_provider(const std::string& spec, const std::optional<Flip>& flip = std::nullopt);

struct SuiteConfig {
  /// rho-full, walks, sublevel, matrix, group, tree, linf, tower, gap or full.
  std::string suite = "full";
  std::uint64_t seed = 1;
  std::string provider = "rho";
  std::optional<Flip> flip;
  UniverseSpec universe;
  Natural xi_max = 8;

  std::size_t triples = 10000;
  std::size_t group_elements = 120;
  std::size_t restriction_triples = 50;
  std::size_t mutations = 5;
  std::size_t linf_nodes = 200;
  std::size_t tower_length = 40;

  std::string tree_file;
  std::string tree_mutant_file;
  std::string pregap_file;
  std::string pregap_single_file;
  /// Optional extra tower manifest to validate.
  std::string tower_file;

  std::string out_dir;
  std::string format = "json";
  std::size_t jobs = 1;
  /// Config file the run came from; empty for configs built in code.
  std::string source;
};

std::vector<std::string> builtin_suites();

/// Reads JSON config text; relative paths resolve against `base_dir`.
SuiteConfig config_from_json(const json& j, const std::string& base_dir);
/// The echo stored in reports: everything that affects results (not jobs or output).
json config_echo(const SuiteConfig& c);
/// Loads and validates a config file; LAB_SEED, when set, overrides the seed.
SuiteConfig load_config(const std::string& path);
/// Throws ConfigError when the suite is unknown or a referenced file is
/// missing or fails to parse.
void validate_config(const SuiteConfig& c);

struct Report {
  int version = 1;
  json config = json::object();
  std::vector<CheckRecord> records;

  json summary() const;
  bool any_fail() const;
};

Report run_suite(const SuiteConfig& c);

/// "json", "csv" or "text".
std::string emit_report(const Report& r, std::string_view format);
Report parse_report(std::string_view json_text);
/// The JSON report with every timing field removed, for determinism checks.
json without_timing(const json& report);

/// The command-line front end; returns the process exit code
/// (0 no fails, 1 a fail, 2 usage, parse or config error).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ordlab
