#pragma once

// Shared generators and brute-force oracles for the test binaries. The
// oracles deliberately avoid the library's closed forms: C-sequence counts
// are found by scanning and walks follow the recursions literally.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "ordlab/ordinal.hpp"

namespace testkit {

using ordlab::Natural;
using ordlab::Ordinal;

inline Ordinal ord(const char* s) { return ordlab::parse_ordinal(s); }

/// Random ordinal below w^max_exp: up to max_terms terms with finite
/// exponents and coefficients in [1, max_coef].
inline Ordinal random_below_omega_pow(std::mt19937_64& rng, Natural max_exp, Natural max_coef, int max_terms = 3) {
  std::uniform_int_distribution<int> nterms(0, max_terms);
  std::uniform_int_distribution<Natural> exp(0, max_exp - 1);
  std::uniform_int_distribution<Natural> coef(1, max_coef);
  std::set<Natural, std::greater<>> exps;
  const int n = nterms(rng);
  for (int i = 0; i < n; ++i) exps.insert(exp(rng));
  std::vector<ordlab::Term> terms;
  for (Natural e : exps) terms.push_back({Ordinal::finite(e), coef(rng)});
  return Ordinal::from_terms(std::move(terms));
}

/// Three distinct ordinals below w^max_exp, ascending.
inline std::array<Ordinal, 3> random_triple(std::mt19937_64& rng, Natural max_exp, Natural max_coef) {
  for (;;) {
    std::array<Ordinal, 3> t{random_below_omega_pow(rng, max_exp, max_coef), random_below_omega_pow(rng, max_exp, max_coef),
                             random_below_omega_pow(rng, max_exp, max_coef)};
    std::sort(t.begin(), t.end());
    if (t[0] < t[1] && t[1] < t[2]) return t;
  }
}

/// |C_beta ∩ alpha| by scanning the fundamental sequence.
inline Natural scan_c_count(const Ordinal& beta, const Ordinal& alpha) {
  if (beta.is_successor()) return ordlab::predecessor(beta) < alpha ? 1 : 0;
  Natural n = 0;
  while (ordlab::fund_seq(beta, n) < alpha) ++n;
  return n;
}

/// min(C_beta \ alpha) by scanning.
inline Ordinal scan_c_step(const Ordinal& beta, const Ordinal& alpha) {
  if (beta.is_successor()) return ordlab::predecessor(beta);
  Natural n = 0;
  while (ordlab::fund_seq(beta, n) < alpha) ++n;
  return ordlab::fund_seq(beta, n);
}

/// The three walk recursions followed literally, one step at a time.
class NaiveWalks {
 public:
  Natural rho(const Ordinal& a, const Ordinal& b) {
    if (a == b) return 0;
    auto key = std::make_pair(a, b);
    if (auto it = rho_.find(key); it != rho_.end()) return it->second;
    Natural v = 0;
    if (b.is_successor()) {
      v = rho(a, ordlab::predecessor(b));
    } else {
      const Natural k = scan_c_count(b, a);
      v = std::max(k, rho(a, scan_c_step(b, a)));
      for (Natural i = 0; i < k; ++i) v = std::max(v, rho(ordlab::fund_seq(b, i), a));
    }
    rho_[key] = v;
    return v;
  }

  Natural rho1(const Ordinal& a, const Ordinal& b) {
    if (a == b) return 0;
    const Natural k = b.is_successor() ? 0 : scan_c_count(b, a);
    return std::max(k, rho1(a, scan_c_step(b, a)));
  }

  Natural rho2(const Ordinal& a, const Ordinal& b) {
    if (a == b) return 0;
    return rho2(a, scan_c_step(b, a)) + 1;
  }

 private:
  std::map<std::pair<Ordinal, Ordinal>, Natural> rho_;
};

}  // namespace testkit
