#pragma once

#include <vector>

#include "facteq/common.hpp"
#include "facteq/factored.hpp"
#include "facteq/primes.hpp"

namespace facteq {

// nu_q(prod_{p<=n}(p-1)) three ways: exact valuation, the progression
// counting identity, and the li(n) main term it approaches.
struct NuQProductRecord {
  Nat n = 0;
  Nat q = 0;
  Nat exact = 0;       // nu_q of the product
  Nat counting = 0;    // sum over j of pi(n; q^j, 1)
  double main_term = 0.0;  // (q/(q-1)^2) * li(n)
};
NuQProductRecord nu_q_prime_product(Nat n, Nat q, const PrimeSieve& sieve);

// Short-interval prime counts against the 2y/log y bound.
struct BrunRecord {
  Nat ell = 0;
  double y = 0.0;      // interval length n/(ell(ell+1))
  Nat count = 0;       // primes in (n/(ell+1), n/ell]
  double bound = 0.0;  // 2y/log y
  bool violated = false;
};
// Intervals with y < 3 are skipped (the bound degenerates).
std::vector<BrunRecord> brun_titchmarsh_check(Nat n, Nat ell_max,
                                              const PrimeSieve& sieve);

// nu_q(sigma_0(n!)) >= pi(n/(q-1)) - pi(n/q), q prime <= sqrt(n).
struct Sigma0BoundRecord {
  Nat n = 0;
  Nat q = 0;
  std::int64_t lhs = 0;
  std::int64_t rhs = 0;
  bool ok = false;
};
Sigma0BoundRecord sigma0_valuation_bound(Nat n, Nat q, const PrimeSieve& sieve);

// Largest prime factor of 2^N - 1. The desk-scale property largest > N is
// recorded per N; the asymptotic expression is informational only.
struct StewartRecord {
  Nat N = 0;
  Nat largest_prime = 0;     // largest certified prime factor found
  bool complete = false;     // factorization fully certified
  bool ok = false;           // largest_prime > N
  double stewart_expr = 0.0; // N * exp(log N / (104 log log N)), N >= 3
};
std::vector<StewartRecord> stewart_check(Nat n_min, Nat n_max,
                                         const FactorEffort& effort = {});

struct SweepResult {
  Nat checks = 0;
  Nat failures = 0;
  double max_constant = 0.0;
};

// 0 < N/(p-1) - nu_p(N!) <= floor(log_p N) + 1 for all 2 <= p <= N <= n_max.
// max_constant: largest observed gap over its allowance (<= 1 means pass).
SweepResult legendre_error_sweep(Nat n_max, const PrimeSieve& sieve);

// nu_p(n!) = ell for every p in (n/(ell+1), n/ell], ell+1 <= sqrt(n),
// for all n <= n_max. max_constant: largest |nu - ell| (0 means pass).
SweepResult interval_valuation_sweep(Nat n_max, const PrimeSieve& sieve);

}  // namespace facteq
