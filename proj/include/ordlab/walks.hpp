#pragma once

// Characteristics of minimal walks along the canonical C-sequence.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ordlab/ordinal.hpp"

namespace ordlab {

enum class WalkFn { rho, rho1, rho2, rho_bar };

std::string_view to_string(WalkFn fn);
WalkFn parse_walk_fn(std::string_view s);

/// The walk beta = b0 > b1 > ... > bk = alpha with b_{i+1} = min(C_{b_i} \ alpha).
std::vector<Ordinal> walk_trace(const Ordinal& alpha, const Ordinal& beta);

/// Memo store for rho, rho1 and rho2.
///
/// Single-writer: confine a context to one thread. Entries are written once
/// and never change, so two contexts always produce identical values.
class WalkContext {
 public:
  struct Limits {
    std::size_t max_depth = 100'000;
    std::size_t max_memo = 10'000'000;
    /// Largest set sublevel() may return.
    std::size_t max_sublevel = 1'000'000;
  };

  struct Stats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;
    std::size_t max_depth = 0;
    std::size_t entries = 0;
  };

  WalkContext() = default;
  explicit WalkContext(Limits limits, bool memoize = true) : limits_(limits), memoize_(memoize) {}

  Natural rho(const Ordinal& alpha, const Ordinal& beta);
  Natural rho1(const Ordinal& alpha, const Ordinal& beta);
  Natural rho2(const Ordinal& alpha, const Ordinal& beta);
  /// 2^rho(a,b) * (2 |{x <= a : rho(x,a) <= rho(a,b)}| + 1).
  Natural rho_bar(const Ordinal& alpha, const Ordinal& beta);
  Natural eval(WalkFn fn, const Ordinal& alpha, const Ordinal& beta);

  /// {x <= alpha : fn(x, alpha) <= c}, ascending. Only rho and rho1 are
  /// supported; rho2 sublevel sets are infinite (Unsupported).
  std::vector<Ordinal> sublevel(WalkFn fn, const Ordinal& alpha, Natural c);
  std::vector<Ordinal> sublevel_rho(const Ordinal& alpha, Natural c) { return sublevel(WalkFn::rho, alpha, c); }
  std::vector<Ordinal> sublevel_rho1(const Ordinal& alpha, Natural c) { return sublevel(WalkFn::rho1, alpha, c); }

  const Stats& stats() const { return stats_; }
  const Limits& limits() const { return limits_; }
  bool memoized() const { return memoize_; }

 private:
  struct PairKey {
    Ordinal alpha;
    Ordinal beta;
    friend bool operator==(const PairKey&, const PairKey&) = default;
  };
  struct PairHash {
    std::size_t operator()(const PairKey& k) const noexcept {
      return k.alpha.hash() * 0x9e3779b97f4a7c15ULL ^ (k.beta.hash() + 0x632be59bd9b4e019ULL);
    }
  };
  struct SublevelKey {
    Ordinal alpha;
    Natural c;
    friend bool operator==(const SublevelKey&, const SublevelKey&) = default;
  };
  struct SublevelHash {
    std::size_t operator()(const SublevelKey& k) const noexcept { return k.alpha.hash() ^ (k.c * 0x9e3779b97f4a7c15ULL); }
  };
  using Table = std::unordered_map<PairKey, Natural, PairHash>;
  using SublevelTable = std::unordered_map<SublevelKey, std::vector<Ordinal>, SublevelHash>;

  Natural walk(WalkFn fn, const Ordinal& alpha, const Ordinal& beta);
  Natural compute(WalkFn fn, const Ordinal& alpha, const Ordinal& beta);
  Table& table(WalkFn fn);
  SublevelTable& sublevel_table(WalkFn fn);
  std::vector<Ordinal> sublevel_impl(WalkFn fn, const Ordinal& alpha, Natural c);
  void store(Table& t, PairKey key, Natural v);

  Limits limits_{};
  bool memoize_ = true;
  Table rho_;
  Table rho1_;
  Table rho2_;
  SublevelTable sub_rho_;
  SublevelTable sub_rho1_;
  Stats stats_;
  std::size_t depth_ = 0;
};

}  // namespace ordlab
