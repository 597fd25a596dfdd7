#pragma once

// Ordinals below epsilon_0 in hereditary Cantor normal form, together with
// the canonical C-sequence used by every walk in the library.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace ordlab {

using Natural = std::uint64_t;

struct Term;

/// An immutable ordinal below epsilon_0.
///
/// The representation is the descending list of (exponent, coefficient)
/// terms; the empty list is 0. Exponents are themselves Ordinals in the same
/// normal form, so equality of values is equality of term lists. Copies share
/// the underlying storage and are safe to pass between threads.
class Ordinal {
 public:
  Ordinal() = default;

  static Ordinal finite(Natural n);
  static Ordinal omega();
  /// omega^exponent * coefficient; coefficient 0 yields 0.
  static Ordinal omega_power(const Ordinal& exponent, Natural coefficient = 1);
  /// Builds from explicit terms, rejecting non-canonical input.
  static Ordinal from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const;
  std::size_t hash() const noexcept;

  bool is_zero() const noexcept { return rep_ == nullptr; }
  bool is_finite() const noexcept;
  bool is_successor() const noexcept;
  bool is_limit() const noexcept;

  /// Value of a finite ordinal; throws DomainError otherwise.
  Natural to_natural() const;
  /// Trailing natural n in this = gamma + n.
  Natural finite_part() const noexcept;
  /// gamma in this = gamma + n with gamma zero or a limit.
  Ordinal without_finite_part() const;
  /// Leading exponent; 0 for the ordinal 0.
  Ordinal leading_exponent() const;

  friend bool operator==(const Ordinal& a, const Ordinal& b) noexcept;
  friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) noexcept;

 private:
  struct Rep;
  explicit Ordinal(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static Ordinal make_unchecked(std::vector<Term> terms);

  std::shared_ptr<const Rep> rep_;
};

struct Term {
  Ordinal exponent;
  Natural coefficient = 1;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Global resource guards for ordinal arithmetic.
struct OrdinalLimits {
  /// Largest natural accepted in a coefficient, c_count result or fund_seq index.
  Natural max_natural = Natural{1} << 32;
};

OrdinalLimits& ordinal_limits();

enum class Cmp { lt, eq, gt };

Cmp cmp(const Ordinal& a, const Ordinal& b) noexcept;

Ordinal parse_ordinal(std::string_view text);
std::string to_string(const Ordinal& a);
std::ostream& operator<<(std::ostream& os, const Ordinal& a);

Ordinal add(const Ordinal& a, const Ordinal& b);
/// omega * a, mapping each term omega^e*c to omega^(1+e)*c.
Ordinal mul_omega_left(const Ordinal& a);
/// The unique d with b + d = a; requires b <= a.
Ordinal subtract_left(const Ordinal& a, const Ordinal& b);
/// a - 1 for a successor a.
Ordinal predecessor(const Ordinal& a);

/// n-th element of the canonical fundamental sequence of the limit `lambda`:
///   (g + w^(b+1))[n] = g + w^b * n,   (g + w^l)[n] = g + w^(l[n])  for limit l.
Ordinal fund_seq(const Ordinal& lambda, Natural n);

/// |C_beta ∩ alpha| for the canonical C-sequence (C_{a+1} = {a}).
/// Requires alpha <= beta and beta > 0; alpha = beta with beta a limit is an
/// infinite count and raises GuardError.
Natural c_count(const Ordinal& beta, const Ordinal& alpha);
/// min(C_beta \ alpha); requires alpha < beta.
Ordinal c_step(const Ordinal& beta, const Ordinal& alpha);
/// Whether x belongs to C_beta.
bool in_c_seq(const Ordinal& beta, const Ordinal& x);

}  // namespace ordlab

template <>
struct std::hash<ordlab::Ordinal> {
  std::size_t operator()(const ordlab::Ordinal& a) const noexcept { return a.hash(); }
};
