#ifndef FACTEQ_PRIMES_HPP
#define FACTEQ_PRIMES_HPP

#include <cstdint>
#include <vector>

#include "facteq/common.hpp"

namespace facteq {

// Smallest-prime-factor table for 2..limit plus the sorted list of primes
// extracted from it. Immutable after construction; safe for concurrent reads.
class PrimeSieve {
 public:
  // Linear SPF sieve. limit must be >= 2.
  explicit PrimeSieve(Nat limit);

  Nat limit() const { return limit_; }

  // Smallest prime factor of n, 2 <= n <= limit.
  Nat spf(Nat n) const;

  bool is_prime(Nat n) const;

  const std::vector<Nat>& primes() const { return primes_; }

  // pi(x): number of primes <= x. Requires x <= limit.
  Nat prime_count(Nat x) const;

  // pi(x; h, a): number of primes p <= x with p == a (mod h). h >= 1;
  // a may be any integer, gcd(a,h) != 1 included. Requires x <= limit.
  Nat prime_count_ap(Nat x, Nat h, std::int64_t a) const;

  // Primes in the interval (n/(ell+1), n/ell], ascending. ell >= 1,
  // n <= limit. Endpoints are handled with exact integer arithmetic.
  std::vector<Nat> interval_primes(Nat n, Nat ell) const;

 private:
  Nat limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<Nat> primes_;
};

// li(x) = integral from 2 to x of du/log u, for x >= 2, with relative error
// <= 1e-9 (adaptive Simpson quadrature).
double log_integral(double x);

}  // namespace facteq

#endif  // FACTEQ_PRIMES_HPP
