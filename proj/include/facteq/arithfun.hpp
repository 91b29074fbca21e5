#pragma once

#include "facteq/common.hpp"
#include "facteq/factored.hpp"
#include "facteq/primes.hpp"

namespace facteq {

// phi(n!) in fully factored form: n! * prod_{p <= n} (p-1)/p.
// Requires sieve.limit() >= max(n, 2).
FactoredNat phi_factorial(Nat n, const PrimeSieve& sieve);

// sigma_0(n!) in fully factored form: prod_{p <= n} (nu_p(n!) + 1).
FactoredNat sigma0_factorial(Nat n, const PrimeSieve& sieve);

// Exact sigma_k(n!) for k >= 1, no factoring attempted.
BigInt sigma_k_value(Nat n, Nat k, const PrimeSieve& sieve);

// sigma_k(n!) for k >= 1. The value is exact; the partial factorization
// covers whatever factor_big could certify within the given effort.
struct SigmaKResult {
  BigInt value;
  PartialFactorization partial;
};
SigmaKResult sigma_k_factorial(Nat n, Nat k, const PrimeSieve& sieve,
                               const FactorEffort& effort = {});

// nu_q(phi(n!)) by counting primes in progressions 1 mod q^j, never touching
// the factored product. Cross-checks phi_factorial.
Nat nu_q_phi_factorial_direct(Nat n, Nat q, const PrimeSieve& sieve);

}  // namespace facteq
