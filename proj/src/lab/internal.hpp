#pragma once

// Pieces shared by the suite runner and the command line.

#include <chrono>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ordlab/group.hpp"
#include "ordlab/lab.hpp"
#include "ordlab/omega_sets.hpp"
#include "ordlab/tree.hpp"

namespace ordlab::lab {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// Platform-independent draw in [lo, hi].
inline Natural uniform(std::mt19937_64& rng, Natural lo, Natural hi) { return lo + rng() % (hi - lo + 1); }

/// Random ordinal below `bound`; naturals drawn for a limit's fundamental
/// sequence stay below cap + 2.
Ordinal random_below(std::mt19937_64& rng, const Ordinal& bound, Natural cap);
/// Up to `max_terms` CNF terms with exponents below `exponent_bound` and
/// coefficients in [1, coef_bound].
Ordinal random_cnf(std::mt19937_64& rng, const Ordinal& exponent_bound, Natural coef_bound, int max_terms = 3);

/// rho and rho1 by their recursions, scanning C-sequences directly.
class LiteralWalks {
 public:
  Natural rho(const Ordinal& a, const Ordinal& b);
  Natural rho1(const Ordinal& a, const Ordinal& b);

 private:
  std::map<std::pair<Ordinal, Ordinal>, Natural> rho_;
};

/// {x <= alpha : f(x, alpha) <= c} for alpha < w*3 by scanning w*j + m with
/// m <= n + c + 5, where alpha = w*j + n. Points past that window walk
/// through a limit whose C-sequence count already exceeds c.
std::vector<Ordinal> sublevel_scan(LiteralWalks& w, WalkFn fn, const Ordinal& alpha, Natural c);

/// Random finite sets of size at most 4 over `universe`.
std::vector<GroupElement> sample_elements(std::uint64_t seed, const std::vector<Ordinal>& universe, std::size_t count);

/// U_xi(alpha) for every index alpha of the universe and xi <= xi_max.
std::vector<Neighborhood> full_base(const ProviderPtr& p, const std::vector<Ordinal>& universe, Natural xi_max);

/// Restriction-cover self-check for one triple: the returned eta and the
/// inclusion F_xi(alpha) ∩ delta ⊆ F_eta(delta) checked over `universe`.
/// Returns a counterexample or null; throws Unsupported when no witness exists.
json restriction_case(const MatrixProvider& p, const Ordinal& delta, Natural xi, const Ordinal& alpha,
                      const std::vector<Ordinal>& universe, Natural* eta_out = nullptr);

/// Tower index layout for a requested length: half naturals, then w + k.
std::vector<Ordinal> tower_layout(std::size_t length);
Tower lab_tower(std::size_t length, std::uint64_t seed, const SetExpr& base);

/// Largest xi for which every stored level has offsets 0..xi, capped at `cap`.
Natural tree_xi_bound(const ExplicitTree& t, Natural cap);

/// Expected splitter outcomes on the mod-4 pre-gap.
struct SplitExample {
  std::string c;
  bool splits;
  std::string index;
  std::string side;
};
const std::vector<SplitExample>& split_examples();

std::string universe_arg(const UniverseSpec& u);

/// Report wrapping a single command's records.
Report command_report(json config, const AxiomReport& r);

}  // namespace ordlab::lab
