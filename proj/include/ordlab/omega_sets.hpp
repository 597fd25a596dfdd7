#pragma once

// Decidable subsets of w: eventually periodic kernels closed under boolean
// operations and a guarded diagonal union, plus towers and pre-gaps built
// from them.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ordlab/matrix.hpp"
#include "ordlab/ordinal.hpp"
#include "ordlab/report.hpp"

namespace ordlab {

/// x is a member iff prefix[x] for x < |prefix|, else period[(x - |prefix|) mod |period|].
struct EPSet {
  std::vector<bool> prefix;
  std::vector<bool> period{false};

  bool contains(Natural x) const;
  bool infinite() const;
  /// Members below |prefix| when the set is finite.
  std::vector<Natural> finite_elements() const;
  /// Shortest period, then shortest prefix. Equal sets have equal normal forms.
  void normalize();

  friend bool operator==(const EPSet&, const EPSet&) = default;
};

enum class SetOp { ep, unite, meet, diff, comp, diag };

struct SetNode;
using SetExpr = std::shared_ptr<const SetNode>;

struct SetNode {
  SetOp op = SetOp::ep;
  EPSet ep;
  std::vector<SetExpr> kids;
  /// Diagonal only: strictly increasing, one per child.
  std::vector<Natural> cuts;
};

SetExpr ep_set(EPSet e);
SetExpr finite_set(const std::vector<Natural>& elems);
/// {x : x mod m in residues}.
SetExpr residue_set(Natural modulus, const std::vector<Natural>& residues);
SetExpr all_set();
SetExpr empty_set();
SetExpr set_union(SetExpr a, SetExpr b);
SetExpr set_inter(SetExpr a, SetExpr b);
SetExpr set_diff(SetExpr a, SetExpr b);
SetExpr set_comp(SetExpr a);
SetExpr set_sym(SetExpr a, SetExpr b);
/// ⋃_i (kids_i \ [0, cuts_i)). Throws DomainError unless cuts are strictly
/// increasing and as many as the children.
SetExpr set_diag(std::vector<SetExpr> kids, std::vector<Natural> cuts);

bool member(const SetExpr& e, Natural x);

struct SetGuards {
  std::size_t max_period = std::size_t{1} << 16;
  std::size_t max_prefix = std::size_t{1} << 20;
  /// How far an undecided expression is scanned for the report.
  Natural scan_bound = 4096;
};

/// The eventually periodic normal form; nullopt when a guard trips.
std::optional<EPSet> to_ep(const SetExpr& e, const SetGuards& guards = {});

struct Finiteness {
  enum class Kind { finite, infinite, undecided };
  Kind kind = Kind::undecided;
  /// The exact set when finite.
  std::vector<Natural> elements;
  /// Scan report when undecided: members found below `scanned`.
  Natural scanned = 0;
  std::size_t hits = 0;
  std::string reason;
};
Finiteness finiteness(const SetExpr& e, const SetGuards& guards = {});

/// Canonical s-expression, e.g. "(diff (ep prefix= period=10) (ep prefix=1 period=0))".
std::string to_string(const SetExpr& e);
/// Accepts (ep prefix=BITS period=BITS), (fin n...), (mod m r...), all, empty,
/// (union A B...), (inter A B...), (diff A B), (comp A), (sym A B),
/// (diag (A B ...) cuts=(c ...)) and names bound in `names`.
SetExpr parse_set(std::string_view text, const std::map<std::string, SetExpr>& names = {});

/// (alpha, beta) -> m asserting a_alpha \ a_beta ⊆ [0, m).
using DiffCertificates = std::map<std::pair<Ordinal, Ordinal>, Natural>;

struct Tower {
  std::vector<Ordinal> indices;
  std::vector<SetExpr> sets;
  DiffCertificates certificates;

  std::size_t position(const Ordinal& alpha) const;
  bool has_index(const Ordinal& alpha) const;
  const SetExpr& set(const Ordinal& alpha) const { return sets[position(alpha)]; }
};

struct PreGap {
  std::vector<Ordinal> indices;
  std::vector<SetExpr> a;
  std::vector<SetExpr> b;
  DiffCertificates cert_a;
  DiffCertificates cert_b;

  std::size_t position(const Ordinal& alpha) const;
  bool has_index(const Ordinal& alpha) const;
};

/// Manifest lines: `set NAME = <sexpr>`, `index <ord> a=<ref> [b=<ref>]`,
/// `cert <ord> <ord> a=<m> [b=<m>]`; a ref is a name or an inline sexpr.
Tower parse_tower(std::string_view text);
PreGap parse_pregap(std::string_view text);
Tower load_tower(const std::string& path);
PreGap load_pregap(const std::string& path);
std::string to_manifest(const Tower& t);
std::string to_manifest(const PreGap& g);

/// Elements of a set known to be finite. Throws DomainError when it is
/// infinite and Undecided when a guard trips.
std::vector<Natural> finite_members(const SetExpr& e, const SetGuards& guards = {});

/// min{xi : a_alpha \ xi ⊆ a_beta} = 1 + max(a_alpha \ a_beta), 0 when empty.
Natural rho_TO(const Tower& t, const Ordinal& alpha, const Ordinal& beta, const SetGuards& guards = {});

struct TowerBuildOptions {
  std::size_t max_length = 64;
  std::uint64_t seed = 0;
};

/// Builds a_alpha for the ascending `indices`, starting from `base` (which
/// must have an infinite complement). Each later index adds the least unused
/// residue class of the complement modulo a working period chosen up front;
/// a limit index is the diagonal over the stored members of its fundamental
/// sequence and the successor of the latest set, with seeded increasing cuts.
/// Every pair carries its exact (tight) certificate.
Tower build_tower(const std::vector<Ordinal>& indices, const SetExpr& base, const TowerBuildOptions& options = {});

AxiomReport validate_tower(const Tower& t, const std::string& replay = {}, const SetGuards& guards = {});
AxiomReport validate_pregap(const PreGap& g, const std::string& replay = {}, const SetGuards& guards = {});

/// alpha ∈ F^G_xi(beta): a_alpha ∩ b_beta ⊆ xi. Requires alpha < beta.
bool gap_F_member(const PreGap& g, const Ordinal& alpha, Natural xi, const Ordinal& beta,
                  const SetGuards& guards = {});

struct SplitResult {
  bool splits = false;
  /// Set when splitting fails.
  std::optional<Ordinal> index;
  std::string side;  // "a" or "b"
  /// When c splits: per index the least xi with a_alpha \ xi ⊆ c and b_alpha ∩ c ⊆ xi.
  std::vector<std::pair<Ordinal, Natural>> least_xi;
};
/// Every a-side condition is checked (in index order) before any b-side one.
SplitResult splitter_check(const SetExpr& c, const PreGap& g, const SetGuards& guards = {});

/// {alpha < beta : a_alpha \ a_beta ⊆ n} over the tower's indices.
std::vector<Ordinal> hausdorff_check(const Tower& t, Natural n, const Ordinal& beta, const SetGuards& guards = {});
/// {alpha < beta : a_alpha ∩ b_beta ⊆ n}.
std::vector<Ordinal> hausdorff_check(const PreGap& g, Natural n, const Ordinal& beta, const SetGuards& guards = {});

/// F^TO_n(beta) = {alpha < beta : a_alpha \ a_beta ⊆ n}; transitive with the
/// witness max{xi, rho_TO(alpha, beta)}.
ProviderPtr make_tower_provider(std::shared_ptr<const Tower> t, std::string replay_args);
/// F^G_n(beta); no (G3) witness is claimed.
ProviderPtr make_gap_provider(std::shared_ptr<const PreGap> g, std::string replay_args);

}  // namespace ordlab
