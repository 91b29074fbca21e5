#pragma once

#include "facteq/common.hpp"
#include "facteq/factored.hpp"
#include "facteq/primes.hpp"

namespace facteq {

// Base-p digit sum s_p(n).
Nat digit_sum(Nat n, Nat p);

// nu_p(n!) as the direct sum of floor(n / p^j).
Nat legendre(Nat n, Nat p);

// nu_p(n!) via (n - s_p(n)) / (p - 1); must agree with legendre().
Nat legendre_digit(Nat n, Nat p);

// Full factorization of n! from Legendre exponents over primes <= n.
// Requires sieve.limit() >= n.
FactoredNat factorial_factored(Nat n, const PrimeSieve& sieve);

}  // namespace facteq
