#include "facteq/lemmalab.hpp"

#include <cmath>
#include <stdexcept>

#include "facteq/arithfun.hpp"
#include "facteq/valuations.hpp"

namespace facteq {

NuQProductRecord nu_q_prime_product(Nat n, Nat q, const PrimeSieve& sieve) {
  if (!sieve.is_prime(q))
    throw std::invalid_argument("nu_q_prime_product: q must be prime");
  if (n > sieve.limit())
    throw std::invalid_argument("nu_q_prime_product: n exceeds sieve limit");
  NuQProductRecord rec;
  rec.n = n;
  rec.q = q;
  for (Nat p : sieve.primes()) {
    if (p > n) break;
    Nat m = p - 1;
    while (m > 0 && m % q == 0) {
      m /= q;
      rec.exact += 1;
    }
  }
  for (Nat qj = q; qj <= n;) {
    rec.counting += sieve.prime_count_ap(n, qj, 1);
    if (qj > n / q) break;
    qj *= q;
  }
  if (n >= 2) {
    double qd = static_cast<double>(q);
    rec.main_term = qd / ((qd - 1.0) * (qd - 1.0)) * log_integral(static_cast<double>(n));
  }
  return rec;
}

std::vector<BrunRecord> brun_titchmarsh_check(Nat n, Nat ell_max,
                                              const PrimeSieve& sieve) {
  if (n > sieve.limit())
    throw std::invalid_argument("brun_titchmarsh_check: n exceeds sieve limit");
  std::vector<BrunRecord> out;
  for (Nat ell = 1; ell <= ell_max; ++ell) {
    double y = static_cast<double>(n) /
               (static_cast<double>(ell) * static_cast<double>(ell + 1));
    if (y < 3.0) continue;  // log y too small for the bound to mean anything
    BrunRecord rec;
    rec.ell = ell;
    rec.y = y;
    rec.count = sieve.interval_primes(n, ell).size();
    rec.bound = 2.0 * y / std::log(y);
    rec.violated = static_cast<double>(rec.count) > rec.bound;
    out.push_back(rec);
  }
  return out;
}

Sigma0BoundRecord sigma0_valuation_bound(Nat n, Nat q, const PrimeSieve& sieve) {
  if (!sieve.is_prime(q))
    throw std::invalid_argument("sigma0_valuation_bound: q must be prime");
  if (q * q > n)
    throw std::invalid_argument("sigma0_valuation_bound: need q <= sqrt(n)");
  Sigma0BoundRecord rec;
  rec.n = n;
  rec.q = q;
  rec.lhs = sigma0_factorial(n, sieve).valuation(q);
  rec.rhs = static_cast<std::int64_t>(sieve.prime_count(n / (q - 1))) -
            static_cast<std::int64_t>(sieve.prime_count(n / q));
  rec.ok = rec.lhs >= rec.rhs;
  return rec;
}

std::vector<StewartRecord> stewart_check(Nat n_min, Nat n_max,
                                         const FactorEffort& effort) {
  if (n_min < 2 || n_max > 64 || n_min > n_max)
    throw std::invalid_argument("stewart_check: need 2 <= N_min <= N_max <= 64");
  std::vector<StewartRecord> out;
  for (Nat N = n_min; N <= n_max; ++N) {
    StewartRecord rec;
    rec.N = N;
    BigInt value = (BigInt(1) << N) - 1;
    PartialFactorization pf = factor_big(value, effort);
    rec.largest_prime = pf.factored_part.max_prime();
    rec.complete = pf.complete();
    if (pf.cofactor != 1 && pf.cofactor_is_prime) {
      rec.complete = true;  // one certified prime left over counts as done
      if (mpz_fits_ulong_p(pf.cofactor.get_mpz_t()))
        rec.largest_prime = std::max<Nat>(rec.largest_prime, pf.cofactor.get_ui());
    }
    rec.ok = rec.largest_prime > N;
    if (N >= 3) {
      double Nd = static_cast<double>(N);
      rec.stewart_expr =
          Nd * std::exp(std::log(Nd) / (104.0 * std::log(std::log(Nd))));
    }
    out.push_back(rec);
  }
  return out;
}

SweepResult legendre_error_sweep(Nat n_max, const PrimeSieve& sieve) {
  if (n_max > sieve.limit())
    throw std::invalid_argument("legendre_error_sweep: n_max exceeds sieve limit");
  SweepResult res;
  for (Nat p : sieve.primes()) {
    if (p > n_max) break;
    double lp = std::log(static_cast<double>(p));
    for (Nat N = p; N <= n_max; ++N) {
      double d = static_cast<double>(N) / static_cast<double>(p - 1) -
                 static_cast<double>(legendre(N, p));
      double allowance =
          std::floor(std::log(static_cast<double>(N)) / lp + 1e-9) + 1.0;
      res.checks += 1;
      if (!(d > 0.0) || d > allowance + 1e-9) res.failures += 1;
      res.max_constant = std::max(res.max_constant, d / allowance);
    }
  }
  return res;
}

SweepResult interval_valuation_sweep(Nat n_max, const PrimeSieve& sieve) {
  if (n_max > sieve.limit())
    throw std::invalid_argument("interval_valuation_sweep: n_max exceeds sieve limit");
  SweepResult res;
  for (Nat n = 2; n <= n_max; ++n) {
    for (Nat ell = 1; (ell + 1) * (ell + 1) <= n; ++ell) {
      for (Nat p : sieve.interval_primes(n, ell)) {
        Nat nu = legendre(n, p);
        res.checks += 1;
        if (nu != ell) res.failures += 1;
        double gap = nu > ell ? static_cast<double>(nu - ell)
                              : static_cast<double>(ell - nu);
        res.max_constant = std::max(res.max_constant, gap);
      }
    }
  }
  return res;
}

}  // namespace facteq
