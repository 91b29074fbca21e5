#include "facteq/primes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace facteq {

PrimeSieve::PrimeSieve(Nat limit) : limit_(limit) {
  if (limit < 2) throw std::invalid_argument("PrimeSieve: limit must be >= 2");
  if (limit >= std::numeric_limits<std::uint32_t>::max())
    throw std::invalid_argument("PrimeSieve: limit too large for 32-bit SPF table");
  spf_.assign(limit + 1, 0);
  // Linear sieve: every composite is crossed off exactly once, by its
  // smallest prime factor.
  for (Nat i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      primes_.push_back(i);
    }
    for (Nat p : primes_) {
      if (p > spf_[i] || i * p > limit) break;
      spf_[i * p] = static_cast<std::uint32_t>(p);
    }
  }
}

Nat PrimeSieve::spf(Nat n) const {
  if (n < 2 || n > limit_)
    throw std::invalid_argument("PrimeSieve::spf: n out of range [2, limit]");
  return spf_[n];
}

bool PrimeSieve::is_prime(Nat n) const {
  if (n < 2) return false;
  if (n > limit_)
    throw std::invalid_argument("PrimeSieve::is_prime: n exceeds sieve limit");
  return spf_[n] == n;
}

Nat PrimeSieve::prime_count(Nat x) const {
  if (x > limit_)
    throw std::invalid_argument("prime_count: x exceeds sieve limit");
  auto it = std::upper_bound(primes_.begin(), primes_.end(), x);
  return static_cast<Nat>(it - primes_.begin());
}

Nat PrimeSieve::prime_count_ap(Nat x, Nat h, std::int64_t a) const {
  if (x > limit_)
    throw std::invalid_argument("prime_count_ap: x exceeds sieve limit");
  if (h < 1) throw std::invalid_argument("prime_count_ap: h must be >= 1");
  Nat residue = static_cast<Nat>(((a % static_cast<std::int64_t>(h)) +
                                  static_cast<std::int64_t>(h)) %
                                 static_cast<std::int64_t>(h));
  Nat count = 0;
  for (Nat p : primes_) {
    if (p > x) break;
    if (p % h == residue) ++count;
  }
  return count;
}

std::vector<Nat> PrimeSieve::interval_primes(Nat n, Nat ell) const {
  if (n > limit_)
    throw std::invalid_argument("interval_primes: n exceeds sieve limit");
  if (ell < 1) throw std::invalid_argument("interval_primes: ell must be >= 1");
  // p > n/(ell+1)  <=>  p >= floor(n/(ell+1)) + 1, and p <= n/ell
  // <=>  p <= floor(n/ell); both exact in integers.
  Nat lo = n / (ell + 1) + 1;
  Nat hi = n / ell;
  std::vector<Nat> out;
  if (hi < 2 || hi < lo) return out;
  auto first = std::lower_bound(primes_.begin(), primes_.end(), lo);
  auto last = std::upper_bound(first, primes_.end(), hi);
  out.assign(first, last);
  return out;
}

namespace {

double li_integrand(double u) { return 1.0 / std::log(u); }

// One Simpson estimate on [a,b].
double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(double a, double fa, double b, double fb, double fm,
                        double whole, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = li_integrand(lm), frm = li_integrand(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps)
    return left + right + delta / 15.0;
  return adaptive_simpson(a, fa, m, fm, flm, left, 0.5 * eps, depth - 1) +
         adaptive_simpson(m, fm, b, fb, frm, right, 0.5 * eps, depth - 1);
}

}  // namespace

double log_integral(double x) {
  if (!(x >= 2.0)) throw std::invalid_argument("log_integral: x must be >= 2");
  if (x == 2.0) return 0.0;
  // Split at powers of 2 so each panel sees a slowly varying integrand, then
  // refine each panel adaptively to a budget well under the 1e-9 target.
  double total = 0.0;
  double a = 2.0;
  // Crude magnitude estimate for the absolute tolerance; li(x) > (x-2)/log x.
  double scale = std::max(1.0, (x - 2.0) / std::log(x));
  double abs_eps = 1e-12 * scale;
  while (a < x) {
    double b = std::min(x, a * 2.0);
    double fa = li_integrand(a), fb = li_integrand(b);
    double fm = li_integrand(0.5 * (a + b));
    double whole = simpson(a, fa, b, fb, fm);
    total += adaptive_simpson(a, fa, b, fb, fm, whole, abs_eps, 48);
    a = b;
  }
  return total;
}

}  // namespace facteq
