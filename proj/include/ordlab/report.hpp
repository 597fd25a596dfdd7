#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ordlab {

using json = nlohmann::json;

enum class Status { pass, fail, skipped, undecided };

std::string_view to_string(Status s);
Status parse_status(std::string_view s);

/// One verified property. A failing record always carries a counterexample
/// that can be replayed.
struct CheckRecord {
  std::string id;
  std::string anchor;
  Status status = Status::pass;
  std::uint64_t checks = 0;
  json counterexample;  // null unless status == fail
  std::string replay;   // CLI command reproducing the counterexample
  json details = json::object();
  double millis = 0.0;  // excluded from determinism comparisons

  friend bool operator==(const CheckRecord&, const CheckRecord&) = default;
};

/// Per-axiom outcome of a verification suite.
struct AxiomReport {
  std::vector<CheckRecord> records;
  std::uint64_t seed = 0;

  /// Adds a record; a later record with the same id replaces the earlier one.
  void add(CheckRecord r);
  const CheckRecord* find(std::string_view id) const;
  Status status(std::string_view id) const;
  bool any_fail() const;
  /// Associative merge; records end up sorted by id.
  void merge(const AxiomReport& other);
  void canonicalize();
};

/// Accumulates the outcome of many instance checks for one property.
class CheckTally {
 public:
  CheckTally(std::string id, std::string anchor) {
    rec_.id = std::move(id);
    rec_.anchor = std::move(anchor);
  }

  void ok() { ++rec_.checks; }
  /// Records a violation; only the first counterexample is kept.
  void violation(json counterexample, std::string replay = {});
  void skip(std::string reason);
  void undecided(std::string reason);
  json& details() { return rec_.details; }
  bool failed() const { return failed_; }

  CheckRecord finish();

 private:
  CheckRecord rec_;
  bool failed_ = false;
  bool skipped_ = false;
  bool undecided_ = false;
  std::uint64_t violations_ = 0;
};

json to_json(const CheckRecord& r);
CheckRecord record_from_json(const json& j);

/// Shell-quotes a CLI argument (single quotes) when needed.
std::string shell_quote(std::string_view arg);
/// Splits a replay command into argv, honouring single quotes.
std::vector<std::string> split_command(std::string_view cmd);

}  // namespace ordlab
