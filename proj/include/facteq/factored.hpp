#ifndef FACTEQ_FACTORED_HPP
#define FACTEQ_FACTORED_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "facteq/common.hpp"
#include "facteq/primes.hpp"

namespace facteq {

// A positive integer as a map prime -> exponent, keys ascending, exponents
// >= 1, no zero exponents stored. The empty map is 1.
class FactoredNat {
 public:
  using Term = std::pair<Nat, std::int64_t>;

  FactoredNat() = default;

  // Canonicalizes (sorts, merges duplicate primes, drops zeros). Throws on
  // negative resulting exponents or non-prime-looking keys (key < 2).
  static FactoredNat from_terms(std::vector<Term> terms);

  static FactoredNat prime_power(Nat p, std::int64_t e);

  bool is_one() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

  std::int64_t valuation(Nat q) const;

  // Largest prime with positive exponent; 0 when the value is 1.
  Nat max_prime() const { return terms_.empty() ? 0 : terms_.back().first; }

  // sum of e * log p / log2 p; 0 for the value 1.
  double log_value() const;
  double log2_value() const;

  bool operator==(const FactoredNat&) const = default;

  // Raises every exponent by a factor (value^k).
  FactoredNat pow(Nat k) const;

 private:
  friend FactoredNat mul(const FactoredNat&, const FactoredNat&);
  friend class FactoredRat;
  std::vector<Term> terms_;
};

// A positive rational as a map prime -> nonzero signed exponent.
class FactoredRat {
 public:
  using Term = std::pair<Nat, std::int64_t>;

  FactoredRat() = default;
  static FactoredRat from_terms(std::vector<Term> terms);
  static FactoredRat from_nat(const FactoredNat& n);
  // a/b reduced; a, b >= 1 factored by trial division (machine word inputs).
  static FactoredRat from_fraction(Nat a, Nat b);

  bool is_one() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }
  std::int64_t valuation(Nat q) const;
  bool is_integer() const;

  // Integral value; requires is_integer().
  FactoredNat to_nat() const;

  // Numerator / denominator as factored naturals.
  FactoredNat numerator() const;
  FactoredNat denominator() const;

  bool operator==(const FactoredRat&) const = default;

 private:
  std::vector<Term> terms_;
};

FactoredNat mul(const FactoredNat& a, const FactoredNat& b);
FactoredRat mul(const FactoredRat& a, const FactoredRat& b);
FactoredRat mul(const FactoredRat& a, const FactoredNat& b);
inline FactoredNat operator*(const FactoredNat& a, const FactoredNat& b) { return mul(a, b); }

// Exact quotient a/b, or the first prime witnessing non-divisibility.
struct NotDivisible {
  Nat witness_prime;
};
std::variant<FactoredNat, NotDivisible> div_exact(const FactoredNat& a,
                                                  const FactoredNat& b);

// a / b as a rational (always defined).
FactoredRat div_rat(const FactoredRat& a, const FactoredRat& b);

// Compares represented magnitudes. Decides by the log-value gap when it is
// safely above rounding error and the 1e-6 slack; otherwise falls back to
// exact big-integer comparison of the reduced parts.
std::strong_ordering compare_values(const FactoredNat& a, const FactoredNat& b);

// The represented integer. Throws ResourceError when the result would
// exceed bit_cap bits.
BigInt expand(const FactoredNat& a, Nat bit_cap = kDefaultBitCap);

// nu_q.
std::int64_t valuation(const FactoredNat& a, Nat q);
std::int64_t valuation(const FactoredRat& a, Nat q);

// Complete factorization of 1 <= n <= sieve.limit() by repeated SPF division.
FactoredNat factor_small(Nat n, const PrimeSieve& sieve);

// value = expand(factored_part) * cofactor. cofactor is 1, or has no prime
// factor below the trial bound used to produce it. cofactor_is_prime marks a
// certified prime left unabsorbed (too large for 64-bit table keys).
struct PartialFactorization {
  FactoredNat factored_part;
  BigInt cofactor = 1;
  bool cofactor_is_prime = false;

  bool complete() const { return cofactor == 1 || cofactor_is_prime; }
};

struct FactorEffort {
  Nat trial_bound = 100000;
  // Pollard-rho iterations allowed per composite.
  std::uint64_t rho_iterations = 10'000'000;
  // Composites above this bit size skip rho (and the probable-prime test,
  // whose single pass already costs minutes at ~1e5 bits) and land in the
  // cofactor unresolved.
  Nat rho_bit_limit = 4096;
};

// Trial division to effort.trial_bound, then Pollard rho with Brent cycle
// detection. Never throws on incompleteness; the unresolved part stays in
// the cofactor.
PartialFactorization factor_big(const BigInt& n, const FactorEffort& effort = {});

// Deterministic Miller-Rabin with witness set {2,...,37}; a proof of
// primality for n < 3.317e24.
inline const BigInt kMillerRabinCertifiedBound = BigInt("3317044064679887385961981");
bool miller_rabin_certified(const BigInt& n);

// Serialization used in solution certificates: JSON object text mapping
// decimal prime strings to decimal exponent strings, keys ascending.
std::string to_json_string(const FactoredNat& a);
std::string to_json_string(const FactoredRat& a);

// Human-readable "2^4 * 3" form; "1" for the empty map.
std::string to_display_string(const FactoredNat& a);
std::string to_display_string(const FactoredRat& a);

}  // namespace facteq

#endif  // FACTEQ_FACTORED_HPP
