#include "ordlab/report.hpp"

#include <algorithm>
#include <cctype>

#include "ordlab/error.hpp"

namespace ordlab {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::pass:
      return "pass";
    case Status::fail:
      return "fail";
    case Status::skipped:
      return "skipped";
    case Status::undecided:
      return "undecided";
  }
  return "?";
}

Status parse_status(std::string_view s) {
  if (s == "pass") return Status::pass;
  if (s == "fail") return Status::fail;
  if (s == "skipped") return Status::skipped;
  if (s == "undecided") return Status::undecided;
  throw ParseError("unknown status '" + std::string(s) + "'");
}

void AxiomReport::add(CheckRecord r) {
  for (auto& existing : records) {
    if (existing.id == r.id) {
      existing = std::move(r);
      return;
    }
  }
  records.push_back(std::move(r));
}

const CheckRecord* AxiomReport::find(std::string_view id) const {
  for (const auto& r : records) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

Status AxiomReport::status(std::string_view id) const {
  const CheckRecord* r = find(id);
  if (!r) throw DomainError("no record '" + std::string(id) + "'");
  return r->status;
}

bool AxiomReport::any_fail() const {
  return std::any_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.status == Status::fail; });
}

void AxiomReport::merge(const AxiomReport& other) {
  for (const auto& r : other.records) add(r);
  canonicalize();
}

void AxiomReport::canonicalize() {
  std::stable_sort(records.begin(), records.end(),
                   [](const CheckRecord& a, const CheckRecord& b) { return a.id < b.id; });
}

void CheckTally::violation(json counterexample, std::string replay) {
  ++rec_.checks;
  ++violations_;
  if (!failed_) {
    rec_.counterexample = std::move(counterexample);
    rec_.replay = std::move(replay);
  }
  failed_ = true;
}

void CheckTally::skip(std::string reason) {
  skipped_ = true;
  rec_.details["skip_reason"] = std::move(reason);
}

void CheckTally::undecided(std::string reason) {
  undecided_ = true;
  rec_.details["undecided"].push_back(std::move(reason));
}

CheckRecord CheckTally::finish() {
  if (failed_) {
    rec_.status = Status::fail;
    rec_.details["violations"] = violations_;
  } else if (undecided_) {
    rec_.status = Status::undecided;
  } else if (skipped_ && rec_.checks == 0) {
    rec_.status = Status::skipped;
  } else {
    rec_.status = Status::pass;
  }
  return rec_;
}

json to_json(const CheckRecord& r) {
  json j;
  j["id"] = r.id;
  j["anchor"] = r.anchor;
  j["status"] = std::string(to_string(r.status));
  j["checks"] = r.checks;
  j["counterexample"] = r.counterexample;
  j["replay"] = r.replay;
  j["details"] = r.details;
  j["timing_ms"] = r.millis;
  return j;
}

CheckRecord record_from_json(const json& j) {
  CheckRecord r;
  r.id = j.at("id").get<std::string>();
  r.anchor = j.at("anchor").get<std::string>();
  r.status = parse_status(j.at("status").get<std::string>());
  r.checks = j.at("checks").get<std::uint64_t>();
  r.counterexample = j.at("counterexample");
  r.replay = j.at("replay").get<std::string>();
  r.details = j.at("details");
  r.millis = j.at("timing_ms").get<double>();
  return r;
}

std::string shell_quote(std::string_view arg) {
  const bool plain = !arg.empty() && std::all_of(arg.begin(), arg.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || std::string_view("-_./=:,").find(c) != std::string_view::npos;
  });
  if (plain) return std::string(arg);
  std::string out = "'";
  for (char c : arg) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

std::vector<std::string> split_command(std::string_view cmd) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quote = false;
  bool have = false;
  for (std::size_t i = 0; i < cmd.size(); ++i) {
    const char c = cmd[i];
    if (in_quote) {
      if (c == '\'') {
        in_quote = false;
      } else {
        cur += c;
      }
    } else if (c == '\'') {
      in_quote = true;
      have = true;
    } else if (c == '\\' && i + 1 < cmd.size()) {
      cur += cmd[++i];
      have = true;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      if (have) out.push_back(std::move(cur));
      cur.clear();
      have = false;
    } else {
      cur += c;
      have = true;
    }
  }
  if (in_quote) throw ParseError("unterminated quote in command");
  if (have) out.push_back(std::move(cur));
  return out;
}

}  // namespace ordlab
