#include "facteq/arithfun.hpp"

#include <stdexcept>

#include "facteq/valuations.hpp"

namespace facteq {

FactoredNat phi_factorial(Nat n, const PrimeSieve& sieve) {
  if (n < 1) throw std::invalid_argument("phi_factorial: n must be >= 1");
  FactoredNat fact = factorial_factored(n, sieve);
  std::vector<FactoredNat::Term> terms;
  for (const auto& [p, e] : fact.terms()) {
    if (e > 1) terms.push_back({p, e - 1});
    // p - 1 contributes its own factorization
    FactoredNat pm1 = factor_small(p - 1, sieve);
    for (const auto& t : pm1.terms()) terms.push_back(t);
  }
  return FactoredNat::from_terms(std::move(terms));
}

FactoredNat sigma0_factorial(Nat n, const PrimeSieve& sieve) {
  if (n < 1) throw std::invalid_argument("sigma0_factorial: n must be >= 1");
  FactoredNat fact = factorial_factored(n, sieve);
  std::vector<FactoredNat::Term> terms;
  for (const auto& [p, e] : fact.terms()) {
    FactoredNat cnt = factor_small(static_cast<Nat>(e) + 1, sieve);
    for (const auto& t : cnt.terms()) terms.push_back(t);
  }
  return FactoredNat::from_terms(std::move(terms));
}

namespace {

// (p^{k(e+1)} - 1) / (p^k - 1), one factor of the sigma_k product
BigInt sigma_k_term(Nat p, std::int64_t e, Nat k) {
  BigInt num, den;
  mpz_ui_pow_ui(num.get_mpz_t(), static_cast<unsigned long>(p),
                static_cast<unsigned long>(k * (static_cast<Nat>(e) + 1)));
  mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(p),
                static_cast<unsigned long>(k));
  num -= 1;
  den -= 1;
  BigInt term;
  mpz_divexact(term.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return term;
}

}  // namespace

BigInt sigma_k_value(Nat n, Nat k, const PrimeSieve& sieve) {
  if (n < 1) throw std::invalid_argument("sigma_k_value: n must be >= 1");
  if (k < 1) throw std::invalid_argument("sigma_k_value: k must be >= 1");
  BigInt value = 1;
  FactoredNat fact = factorial_factored(n, sieve);
  for (const auto& [p, e] : fact.terms()) value *= sigma_k_term(p, e, k);
  return value;
}

SigmaKResult sigma_k_factorial(Nat n, Nat k, const PrimeSieve& sieve,
                               const FactorEffort& effort) {
  if (n < 1) throw std::invalid_argument("sigma_k_factorial: n must be >= 1");
  if (k < 1) throw std::invalid_argument("sigma_k_factorial: k must be >= 1");
  FactoredNat fact = factorial_factored(n, sieve);
  SigmaKResult out;
  out.value = 1;
  std::vector<FactoredNat::Term> known;
  std::vector<std::pair<BigInt, bool>> cofactors;  // value, certified prime
  for (const auto& [p, e] : fact.terms()) {
    BigInt term = sigma_k_term(p, e, k);
    out.value *= term;
    PartialFactorization pf = factor_big(term, effort);
    for (const auto& t : pf.factored_part.terms()) known.push_back(t);
    if (pf.cofactor != 1) cofactors.push_back({pf.cofactor, pf.cofactor_is_prime});
  }
  out.partial.factored_part = FactoredNat::from_terms(std::move(known));
  if (cofactors.empty()) {
    out.partial.cofactor = 1;
  } else if (cofactors.size() == 1) {
    out.partial.cofactor = cofactors[0].first;
    out.partial.cofactor_is_prime = cofactors[0].second;
  } else {
    out.partial.cofactor = 1;
    for (const auto& [c, isp] : cofactors) out.partial.cofactor *= c;
    out.partial.cofactor_is_prime = false;
  }
  return out;
}

Nat nu_q_phi_factorial_direct(Nat n, Nat q, const PrimeSieve& sieve) {
  if (!sieve.is_prime(q))
    throw std::invalid_argument("nu_q_phi_factorial_direct: q must be prime");
  // nu_q(phi(n!)) = nu_q(n!) - [q <= n] + sum_j pi(n; q^j, 1)
  Nat total = legendre(n, q);
  if (q <= n) total -= 1;
  for (Nat qj = q; qj <= n;) {
    total += sieve.prime_count_ap(n, qj, 1);
    if (qj > n / q) break;
    qj *= q;
  }
  return total;
}

}  // namespace facteq
