#pragma once

// The group of finite sets of ordinals under symmetric difference and the
// neighborhoods of the identity induced by a matrix.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ordlab/matrix.hpp"

namespace ordlab {

/// A finite set of ordinals, kept sorted and duplicate-free.
class GroupElement {
 public:
  GroupElement() = default;
  explicit GroupElement(std::vector<Ordinal> elems);

  const std::vector<Ordinal>& elems() const { return elems_; }
  bool empty() const { return elems_.empty(); }
  std::size_t size() const { return elems_.size(); }
  bool contains(const Ordinal& x) const;

  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;

 private:
  std::vector<Ordinal> elems_;
};

GroupElement sym_diff(const GroupElement& a, const GroupElement& b);
/// "{1,w+2}" form; parse accepts the braces optional and whitespace anywhere.
std::string to_string(const GroupElement& a);
GroupElement parse_group_element(std::string_view text);

/// U_xi(alpha) = {a : a ∩ F_xi(alpha) = ∅}.
struct BasicNbhd {
  Natural xi = 0;
  Ordinal alpha;
  ProviderPtr provider;
};

/// ⋂_{(xi, beta) in K} U_xi(beta).
struct SubbaseNbhd {
  std::vector<std::pair<Natural, Ordinal>> K;
  ProviderPtr provider;
};

using Neighborhood = std::variant<BasicNbhd, SubbaseNbhd>;

std::string describe(const Neighborhood& u);
/// CLI form "xi,alpha" or "xi,alpha;xi,alpha;..." (a subbase intersection).
std::string nbhd_arg(const Neighborhood& u);
Neighborhood parse_nbhd(std::string_view text, ProviderPtr provider);

bool in_neighborhood(const GroupElement& a, const Neighborhood& u);

/// W ⊆ U ∩ V: for basic U_xi(alpha), U_eta(beta) with alpha <= beta it is
/// U_zeta(beta), zeta = max{eta, xi0} with xi0 the (G3) witness; subbase
/// neighborhoods merge their index sets. nullopt without a (G3) witness.
std::optional<Neighborhood> meet_witness(const Neighborhood& u, const Neighborhood& v);

struct GroupVerifyOptions {
  /// Pairs of neighborhoods beyond this many are subsampled for (5).
  std::size_t max_nbhd_pairs = 2000;
  /// Pairs of elements beyond this many are subsampled for (1) and (3).
  std::size_t max_element_pairs = 20000;
  /// Search bound for rho_F in (6).
  Natural search_bound = 1024;
  /// Least index above a given ordinal, for (6) and the character check.
  /// Defaults to x + 1 when that lies in the index set.
  std::function<std::optional<Ordinal>(const Ordinal&)> index_above;
  /// Replay command prefix; defaults to "ordlab group check" plus the provider arguments.
  std::string replay_prefix;
};

/// Conditions (1)-(6) for the base on the sampled elements, plus the finite
/// character fragment: a fresh U_xi0(beta) is not covered by the sampled base.
AxiomReport verify_group_axioms(const std::vector<Neighborhood>& base, const std::vector<GroupElement>& elements,
                                std::uint64_t seed, const GroupVerifyOptions& options = {});

struct TailIndex {
  std::size_t index;
};
struct Counterexample {
  std::vector<std::size_t> indices;
};
using Convergence = std::variant<TailIndex, Counterexample>;

/// Least t with seq[i] in U for all i >= t, or the indices outside U when the
/// last element is outside U.
Convergence converges(const std::vector<GroupElement>& seq, const Neighborhood& u);

/// eta with F_xi(alpha) ∩ delta ⊆ F_eta(delta): the (G3) witness when
/// alpha <= delta, the (G4) witness when delta < alpha. The inclusion is
/// checked on F_xi(alpha) (enumerated when alpha < enumerate_below) and on
/// `sample` before returning.
Natural restriction_cover(const Ordinal& delta, Natural xi, const Ordinal& alpha, const MatrixProvider& p,
                          const std::vector<Ordinal>& sample = {},
                          const Ordinal& enumerate_below = Ordinal::omega_power(Ordinal::finite(2)));

}  // namespace ordlab
