#include "facteq/valuations.hpp"

#include <stdexcept>

namespace facteq {

Nat digit_sum(Nat n, Nat p) {
  if (p < 2) throw std::invalid_argument("digit_sum: base must be >= 2");
  Nat s = 0;
  while (n > 0) {
    s += n % p;
    n /= p;
  }
  return s;
}

Nat legendre(Nat n, Nat p) {
  if (p < 2) throw std::invalid_argument("legendre: p must be >= 2");
  Nat total = 0;
  for (Nat q = p;;) {
    total += n / q;
    if (q > n / p) break;  // q*p would overflow past n
    q *= p;
  }
  return total;
}

Nat legendre_digit(Nat n, Nat p) {
  if (p < 2) throw std::invalid_argument("legendre_digit: p must be >= 2");
  return (n - digit_sum(n, p)) / (p - 1);
}

FactoredNat factorial_factored(Nat n, const PrimeSieve& sieve) {
  if (n > sieve.limit())
    throw std::invalid_argument("factorial_factored: n exceeds sieve limit");
  std::vector<FactoredNat::Term> terms;
  for (Nat p : sieve.primes()) {
    if (p > n) break;
    terms.push_back({p, static_cast<std::int64_t>(legendre(n, p))});
  }
  return FactoredNat::from_terms(std::move(terms));
}

}  // namespace facteq
