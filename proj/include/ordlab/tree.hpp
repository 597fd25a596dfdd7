#pragma once

// Finite tree fragments whose levels sit at indices alpha with w*alpha = alpha
// (nodes of level alpha are alpha + eta), the matrix F^T they induce, and the
// l-infinity calculus on finite sequences of naturals.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ordlab/matrix.hpp"
#include "ordlab/walks.hpp"

namespace ordlab {

struct TreeNode {
  Ordinal id;
  Ordinal level;
  Natural offset = 0;
  /// Empty for nodes hanging from the virtual root. More than one entry is
  /// kept so malformed fragments can be ingested and then reported.
  std::vector<Ordinal> parents;
};

/// One problem found by ExplicitTree::validate().
struct TreeIssue {
  std::string kind;
  json detail;
};

class ExplicitTree {
 public:
  /// Adds a node; id must equal level + offset and level must satisfy w*level = level.
  void add_node(const Ordinal& id, const Ordinal& level, Natural offset, std::optional<Ordinal> parent);

  bool contains(const Ordinal& id) const { return nodes_.contains(id); }
  const TreeNode& node(const Ordinal& id) const;
  const std::map<Ordinal, TreeNode>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  /// Stored levels, ascending.
  std::vector<Ordinal> levels() const;
  /// Nodes of a level ordered by offset.
  std::vector<Ordinal> level_nodes(const Ordinal& level) const;
  /// Largest stored offset on the level, nullopt when the level is absent.
  std::optional<Natural> max_offset(const Ordinal& level) const;

  /// Every node reachable through parent links (all parents when several).
  std::set<Ordinal> ancestors(const Ordinal& id) const;
  bool precedes(const Ordinal& a, const Ordinal& b) const;

  /// Tree-order problems: unknown parents, parents not on a lower level,
  /// several parents, cycles, non-normal placement.
  std::vector<TreeIssue> validate() const;

 private:
  std::map<Ordinal, TreeNode> nodes_;
};

/// Reads `node <ord> level <ord> offset <nat> parent <ord|root>` lines;
/// '#' starts a comment.
ExplicitTree parse_tree(std::string_view text);
ExplicitTree load_tree(const std::string& path);

/// gamma ∈ F^T_xi(alpha): gamma < alpha lies below some alpha + eta, eta <= xi.
/// Throws IncompleteData when a node alpha + eta with eta <= xi is missing.
bool tree_F_member(const ExplicitTree& t, const Ordinal& gamma, Natural xi, const Ordinal& alpha);

/// The (G3) witness sup{eta_e : e <= xi} where alpha + e ≺ beta + eta_e.
Natural tree_g3_witness(const ExplicitTree& t, Natural xi, const Ordinal& alpha, const Ordinal& beta);

/// The (G4) witness sup{xi_e : e <= eta} where alpha + xi_e ≺ beta + e.
/// Throws DomainError naming the offending node when xi_e is not unique.
Natural tree_g4_witness(const ExplicitTree& t, Natural eta, const Ordinal& alpha, const Ordinal& beta);

/// Checks the tree order and (G1)-(G4) on the fragment with xi <= xi_max,
/// using the sup witnesses computed from stored chains.
AxiomReport verify_tree_matrix(const ExplicitTree& t, const std::vector<Ordinal>& levels, Natural xi_max,
                               const std::string& replay = {});

struct ChainReport {
  std::vector<std::vector<Ordinal>> chains;
  std::size_t longest = 0;
};
/// Maximal chains (root-to-leaf paths) of the fragment.
ChainReport branch_check(const ExplicitTree& t);

struct AntichainReport {
  std::size_t max_antichain = 0;
  std::vector<Ordinal> witness;
  std::map<Ordinal, std::size_t> level_sizes;
};
/// Largest antichain via a minimum chain cover (Dilworth).
AntichainReport antichain_check(const ExplicitTree& t);

/// F^T as a matrix provider with index set the stored levels.
ProviderPtr make_tree_provider(std::shared_ptr<const ExplicitTree> t, std::string replay_args);

// l-infinity nodes.

struct FinSeqNode {
  std::vector<Natural> values;
  /// Set when the node is <rho2(g, beta) : g < alpha>.
  std::optional<std::pair<Ordinal, Natural>> generator;

  std::size_t dom() const { return values.size(); }
  friend bool operator==(const FinSeqNode& a, const FinSeqNode& b) { return a.values == b.values; }
};

std::string to_string(const FinSeqNode& s);
/// "(1,5,3)" or "rho2 beta=<ord> alpha=<nat>".
FinSeqNode parse_finseq(std::string_view text, WalkContext& ctx);

/// sup of |s(g) - t(g)| over the common domain; 0 when it is empty.
Natural norm_diff(const FinSeqNode& s, const FinSeqNode& t);
/// s ∈ F^inf_n(t): dom(s) < dom(t) and norm_diff(s, t) <= n.
bool linf_F_member(const FinSeqNode& s, const FinSeqNode& t, Natural n);
/// k = ||t - s|| + max{m, n}.
Natural linf_witness_k(const FinSeqNode& s, const FinSeqNode& t, Natural m, Natural n);
/// <rho2(g, beta) : g < alpha>.
FinSeqNode gen_rho2_node(const Ordinal& beta, Natural alpha, WalkContext& ctx);
/// Coordinates of the common domain where s and t disagree.
std::vector<std::size_t> coherence_check(const FinSeqNode& s, const FinSeqNode& t);

struct NormLowerBound {
  Natural value = 0;
  std::size_t probes = 0;
  /// Always true: probing finitely many coordinates only bounds the sup below.
  bool lower_bound_only = true;
};
/// max |rho2(g, beta1) - rho2(g, beta2)| over the probes g < alpha; a lower
/// bound on the norm of the difference of the two generated nodes.
NormLowerBound rho2_norm_lower_bound(const Ordinal& beta1, const Ordinal& beta2, const Ordinal& alpha,
                                     const std::vector<Ordinal>& probes, WalkContext& ctx);

/// For every pair s, t in the universe (dom(s) <= dom(t)) and m, n <= mn_max,
/// checks F^inf_m(s) ⊆ F^inf_k(t) and F^inf_n(t) ⊆ F^inf_k(t) over the universe.
CheckRecord verify_linf_witness(const std::vector<FinSeqNode>& universe, Natural mn_max);

}  // namespace ordlab
