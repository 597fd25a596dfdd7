#pragma once

// Doubly indexed families F_xi(alpha) with xi natural (kappa = lambda = w),
// their axioms (G1)-(G4), rho_F, unboundedness search and condition (H).

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ordlab/ordinal.hpp"
#include "ordlab/report.hpp"
#include "ordlab/walks.hpp"

namespace ordlab {

/// Membership oracle for gamma in F_xi(alpha).
///
/// Implementations are immutable after construction and member() is safe
/// to call concurrently.
class MatrixProvider {
 public:
  virtual ~MatrixProvider() = default;

  /// The index set C.
  virtual bool in_index_set(const Ordinal& alpha) const = 0;
  virtual bool member(const Ordinal& gamma, Natural xi, const Ordinal& alpha) const = 0;
  /// Exact F_xi(alpha), ascending, when cheaply available.
  virtual std::optional<std::vector<Ordinal>> enumerate(Natural /*xi*/, const Ordinal& /*alpha*/) const {
    return std::nullopt;
  }
  /// eta with F_xi(alpha) ⊆ F_eta(beta) for alpha <= beta.
  virtual std::optional<Natural> witness_g3(Natural /*xi*/, const Ordinal& /*alpha*/, const Ordinal& /*beta*/) const {
    return std::nullopt;
  }
  /// xi with F_eta(beta) ∩ alpha ⊆ F_xi(alpha) for alpha <= beta.
  virtual std::optional<Natural> witness_g4(Natural /*eta*/, const Ordinal& /*alpha*/, const Ordinal& /*beta*/) const {
    return std::nullopt;
  }
  /// Claims (G4).
  virtual bool strong() const { return false; }
  /// r(gamma, alpha) for providers built from a function; lets rho_F skip the search.
  virtual std::optional<Natural> direct_rho(const Ordinal& /*gamma*/, const Ordinal& /*alpha*/) const {
    return std::nullopt;
  }
  /// CLI arguments that rebuild this provider, e.g. "--provider rho".
  virtual std::string replay_args() const = 0;
};

using ProviderPtr = std::shared_ptr<const MatrixProvider>;
using PairFunction = std::function<Natural(const Ordinal&, const Ordinal&)>;
using Enumerator = std::function<std::vector<Ordinal>(Natural, const Ordinal&)>;

struct FunctionMatrixOptions {
  std::string replay_args;
  bool subadditive = false;
  /// Index set; all ordinals when empty.
  std::function<bool(const Ordinal&)> index_set;
  /// Exact sublevel enumeration {x <= alpha : r(x, alpha) <= xi}; optional.
  Enumerator sublevel;
};

/// F^r_xi(beta) = {alpha < beta : r(alpha, beta) <= xi}, with the witnesses
/// eta = max{xi, r(alpha, beta)} for (G3) and, for subadditive r,
/// xi = max{eta, r(alpha, beta)} for (G4).
ProviderPtr from_function(PairFunction r, FunctionMatrixOptions options);

/// The provider of a walk characteristic (rho is subadditive, rho1 is only
/// transitive). The walk memo is owned by the provider and guarded by a mutex.
ProviderPtr make_walk_provider(WalkFn fn);

/// Copy of `base` with the membership of (gamma, xi, alpha) inverted.
ProviderPtr make_flipped(ProviderPtr base, Ordinal gamma, Natural xi, Ordinal alpha);

/// min{xi : alpha ∈ F_xi(beta)}. Function providers answer directly; others
/// are searched up to `search_bound` (NotFoundWithinBound otherwise).
Natural rho_F(const MatrixProvider& p, const Ordinal& alpha, const Ordinal& beta, Natural search_bound);

struct MatrixVerifyOptions {
  /// Search bound for rho_F on providers without a direct function.
  Natural search_bound = 1024;
  /// Elements alpha below this bound also get an enumerate-vs-member check.
  Ordinal enumerate_below = parse_ordinal("w*3");
  /// Pairs alpha <= beta beyond this many are subsampled with the seed.
  std::size_t max_pairs = 5000;
};

/// Checks (G1)-(G4) and directedness on every instance drawn from `universe`
/// with xi, eta <= xi_max. Instances whose witness is missing are skipped.
AxiomReport verify_axioms(const MatrixProvider& p, const std::vector<Ordinal>& universe, Natural xi_max,
                          std::uint64_t seed, const MatrixVerifyOptions& options = {});

// Single-instance checks; each returns a counterexample or nullopt.
std::optional<json> check_g1(const MatrixProvider& p, const Ordinal& gamma, const Ordinal& alpha, Natural xi_max,
                             Natural search_bound);
std::optional<json> check_g2(const MatrixProvider& p, const Ordinal& gamma, Natural xi, const Ordinal& alpha);
std::optional<json> check_g3(const MatrixProvider& p, const Ordinal& gamma, Natural xi, const Ordinal& alpha,
                             const Ordinal& beta);
std::optional<json> check_g4(const MatrixProvider& p, const Ordinal& gamma, Natural eta, const Ordinal& alpha,
                             const Ordinal& beta);
std::optional<json> check_directed(const MatrixProvider& p, const Ordinal& gamma, Natural xi, const Ordinal& alpha,
                                   Natural eta, const Ordinal& beta);
std::optional<json> check_enumerate(const MatrixProvider& p, Natural xi, const Ordinal& alpha);

struct UnboundedWitness {
  std::size_t first;
  std::size_t second;
};

/// Searches pairs i < j of `family` (pairwise disjoint finite sets) with
/// f(min(x, y), max(x, y)) > xi for all x in family[i] and y in family[j].
/// nullopt means every pair was scanned without success.
std::optional<UnboundedWitness> unbounded_search(const PairFunction& f, const std::vector<std::vector<Ordinal>>& family,
                                                 Natural xi);

/// |{alpha < beta : f(alpha, beta) <= xi}|; rho and rho1 only.
Natural condition_H_count(WalkContext& ctx, WalkFn fn, const Ordinal& beta, Natural xi);

json ordinals_to_json(const std::vector<Ordinal>& v);

}  // namespace ordlab
