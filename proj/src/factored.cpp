#include "facteq/factored.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace facteq {

namespace {

void canonicalize(std::vector<FactoredNat::Term>& terms, bool allow_negative) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms.size();) {
    Nat p = terms[i].first;
    if (p < 2) throw std::invalid_argument("factored term: key must be >= 2");
    std::int64_t e = 0;
    for (; i < terms.size() && terms[i].first == p; ++i) e += terms[i].second;
    if (e == 0) continue;
    if (e < 0 && !allow_negative)
      throw std::invalid_argument("FactoredNat: negative exponent");
    terms[out++] = {p, e};
  }
  terms.resize(out);
}

std::vector<FactoredNat::Term> merge_terms(
    const std::vector<FactoredNat::Term>& a,
    const std::vector<FactoredNat::Term>& b, std::int64_t b_sign) {
  std::vector<FactoredNat::Term> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back({b[j].first, b_sign * b[j].second});
      ++j;
    } else {
      std::int64_t e = a[i].second + b_sign * b[j].second;
      if (e != 0) out.push_back({a[i].first, e});
      ++i;
      ++j;
    }
  }
  return out;
}

std::int64_t lookup_exponent(const std::vector<FactoredNat::Term>& terms, Nat q) {
  auto it = std::lower_bound(
      terms.begin(), terms.end(), q,
      [](const FactoredNat::Term& t, Nat key) { return t.first < key; });
  if (it != terms.end() && it->first == q) return it->second;
  return 0;
}

double log_sum(const std::vector<FactoredNat::Term>& terms, double base_log) {
  double s = 0.0, c = 0.0;  // Kahan
  for (const auto& [p, e] : terms) {
    double term = static_cast<double>(e) * (std::log(static_cast<double>(p)) / base_log);
    double y = term - c;
    double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

std::vector<FactoredNat::Term> factor_u64_trial(Nat n) {
  std::vector<FactoredNat::Term> terms;
  for (Nat d = 2; d <= n / d; d += (d == 2 ? 1 : 2)) {
    if (n % d == 0) {
      std::int64_t e = 0;
      while (n % d == 0) {
        n /= d;
        ++e;
      }
      terms.push_back({d, e});
    }
  }
  if (n > 1) terms.push_back({n, 1});
  return terms;
}

}  // namespace

FactoredNat FactoredNat::from_terms(std::vector<Term> terms) {
  canonicalize(terms, /*allow_negative=*/false);
  FactoredNat out;
  out.terms_ = std::move(terms);
  return out;
}

FactoredNat FactoredNat::prime_power(Nat p, std::int64_t e) {
  if (p < 2) throw std::invalid_argument("prime_power: p must be >= 2");
  if (e < 0) throw std::invalid_argument("prime_power: negative exponent");
  FactoredNat out;
  if (e > 0) out.terms_.push_back({p, e});
  return out;
}

std::int64_t FactoredNat::valuation(Nat q) const { return lookup_exponent(terms_, q); }

double FactoredNat::log_value() const { return log_sum(terms_, 1.0); }
double FactoredNat::log2_value() const { return log_sum(terms_, std::log(2.0)); }

FactoredNat FactoredNat::pow(Nat k) const {
  FactoredNat out;
  if (k == 0) return out;
  out.terms_ = terms_;
  for (auto& [p, e] : out.terms_) e *= static_cast<std::int64_t>(k);
  return out;
}

FactoredRat FactoredRat::from_terms(std::vector<Term> terms) {
  canonicalize(terms, /*allow_negative=*/true);
  FactoredRat out;
  out.terms_ = std::move(terms);
  return out;
}

FactoredRat FactoredRat::from_nat(const FactoredNat& n) {
  FactoredRat out;
  out.terms_ = n.terms();
  return out;
}

FactoredRat FactoredRat::from_fraction(Nat a, Nat b) {
  if (a < 1 || b < 1)
    throw std::invalid_argument("from_fraction: numerator and denominator must be >= 1");
  auto terms = factor_u64_trial(a);
  for (const auto& [p, e] : factor_u64_trial(b)) terms.push_back({p, -e});
  return from_terms(std::move(terms));
}

std::int64_t FactoredRat::valuation(Nat q) const { return lookup_exponent(terms_, q); }

bool FactoredRat::is_integer() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const Term& t) { return t.second > 0; });
}

FactoredNat FactoredRat::to_nat() const {
  if (!is_integer())
    throw std::invalid_argument("FactoredRat::to_nat: value is not an integer");
  return FactoredNat::from_terms(terms_);
}

FactoredNat FactoredRat::numerator() const {
  std::vector<Term> pos;
  for (const auto& t : terms_)
    if (t.second > 0) pos.push_back(t);
  return FactoredNat::from_terms(std::move(pos));
}

FactoredNat FactoredRat::denominator() const {
  std::vector<Term> neg;
  for (const auto& t : terms_)
    if (t.second < 0) neg.push_back({t.first, -t.second});
  return FactoredNat::from_terms(std::move(neg));
}

FactoredNat mul(const FactoredNat& a, const FactoredNat& b) {
  return FactoredNat::from_terms(merge_terms(a.terms(), b.terms(), +1));
}

FactoredRat mul(const FactoredRat& a, const FactoredRat& b) {
  return FactoredRat::from_terms(merge_terms(a.terms(), b.terms(), +1));
}

FactoredRat mul(const FactoredRat& a, const FactoredNat& b) {
  return FactoredRat::from_terms(merge_terms(a.terms(), b.terms(), +1));
}

std::variant<FactoredNat, NotDivisible> div_exact(const FactoredNat& a,
                                                  const FactoredNat& b) {
  // b's exponents must be covered by a's; the first prime where they are not
  // is the witness.
  const auto& ta = a.terms();
  const auto& tb = b.terms();
  std::size_t i = 0;
  for (const auto& [p, eb] : tb) {
    while (i < ta.size() && ta[i].first < p) ++i;
    if (i == ta.size() || ta[i].first != p || ta[i].second < eb)
      return NotDivisible{p};
  }
  return FactoredNat::from_terms(merge_terms(ta, tb, -1));
}

FactoredRat div_rat(const FactoredRat& a, const FactoredRat& b) {
  return FactoredRat::from_terms(merge_terms(a.terms(), b.terms(), -1));
}

std::strong_ordering compare_values(const FactoredNat& a, const FactoredNat& b) {
  if (a.terms() == b.terms()) return std::strong_ordering::equal;
  // Signed log gap over the merged term lists; terms shared by both sides
  // cancel instead of inflating the rounding error.
  auto diff_terms = merge_terms(a.terms(), b.terms(), -1);
  double diff = 0.0, abs_acc = 0.0, c = 0.0;
  for (const auto& [p, e] : diff_terms) {
    double term = static_cast<double>(e) * std::log(static_cast<double>(p));
    abs_acc += std::abs(term);
    double y = term - c;
    double t = diff + y;
    c = (t - diff) - y;
    diff = t;
  }
  double slack = std::max(1e-6, abs_acc * 1e-12);
  if (diff > slack) return std::strong_ordering::greater;
  if (diff < -slack) return std::strong_ordering::less;
  // Near-tie: strip the shared part and compare the reduced sides exactly.
  std::vector<FactoredNat::Term> ra, rb;
  for (const auto& [p, e] : diff_terms) {
    if (e > 0)
      ra.push_back({p, e});
    else
      rb.push_back({p, -e});
  }
  BigInt ea = expand(FactoredNat::from_terms(std::move(ra)), Nat{1} << 26);
  BigInt eb = expand(FactoredNat::from_terms(std::move(rb)), Nat{1} << 26);
  int cmp = mpz_cmp(ea.get_mpz_t(), eb.get_mpz_t());
  if (cmp < 0) return std::strong_ordering::less;
  if (cmp > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

namespace {

// Balanced product over [lo, hi) keeps intermediate operands similar in size.
BigInt product_tree(const std::vector<FactoredNat::Term>& terms, std::size_t lo,
                    std::size_t hi) {
  if (hi - lo == 1) {
    BigInt v;
    mpz_ui_pow_ui(v.get_mpz_t(), static_cast<unsigned long>(terms[lo].first),
                  static_cast<unsigned long>(terms[lo].second));
    return v;
  }
  std::size_t mid = lo + (hi - lo) / 2;
  return product_tree(terms, lo, mid) * product_tree(terms, mid, hi);
}

}  // namespace

BigInt expand(const FactoredNat& a, Nat bit_cap) {
  if (a.is_one()) return BigInt(1);
  double bits = a.log2_value();
  if (bits > static_cast<double>(bit_cap) + 1.0)
    throw ResourceError("expand: result of ~" +
                        std::to_string(static_cast<Nat>(bits)) +
                        " bits exceeds the bit cap of " + std::to_string(bit_cap));
  return product_tree(a.terms(), 0, a.terms().size());
}

std::int64_t valuation(const FactoredNat& a, Nat q) { return a.valuation(q); }
std::int64_t valuation(const FactoredRat& a, Nat q) { return a.valuation(q); }

FactoredNat factor_small(Nat n, const PrimeSieve& sieve) {
  if (n < 1) throw std::invalid_argument("factor_small: n must be >= 1");
  if (n > sieve.limit())
    throw std::invalid_argument("factor_small: n exceeds sieve limit");
  std::vector<FactoredNat::Term> terms;
  while (n > 1) {
    Nat p = sieve.spf(n);
    std::int64_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    terms.push_back({p, e});  // SPF walk yields ascending primes
  }
  return FactoredNat::from_terms(std::move(terms));
}

bool miller_rabin_certified(const BigInt& n) {
  if (n >= kMillerRabinCertifiedBound)
    throw std::invalid_argument("miller_rabin_certified: n out of certified range");
  if (n < 2) return false;
  static const unsigned long witnesses[] = {2,  3,  5,  7,  11, 13,
                                            17, 19, 23, 29, 31, 37};
  for (unsigned long w : witnesses) {
    if (mpz_cmp_ui(n.get_mpz_t(), w) == 0) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), w)) return false;
  }
  BigInt d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  BigInt nm1 = n - 1;
  for (unsigned long w : witnesses) {
    BigInt x, base(static_cast<unsigned long>(w));
    mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == nm1) continue;
    bool composite = true;
    for (unsigned long r = 1; r < s; ++r) {
      x = (x * x) % n;
      if (x == nm1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

namespace {

// Brent-cycle Pollard rho. Returns a nontrivial divisor of odd composite n,
// or 0 when the iteration budget runs out.
BigInt pollard_rho_brent(const BigInt& n, std::uint64_t& budget) {
  const unsigned long batch = 128;
  for (unsigned long c = 1; budget > 0; c += 2) {
    BigInt y(2), x, ys, q(1), g(1);
    Nat r = 1;
    while (g == 1 && budget > 0) {
      x = y;
      for (Nat i = 0; i < r && budget > 0; ++i) {
        y = (y * y + c) % n;
        --budget;
      }
      Nat k = 0;
      while (k < r && g == 1 && budget > 0) {
        ys = y;
        Nat steps = std::min<Nat>(batch, r - k);
        for (Nat i = 0; i < steps && budget > 0; ++i) {
          y = (y * y + c) % n;
          --budget;
          q = q * abs(x - y) % n;
        }
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
        k += steps;
      }
      r *= 2;
    }
    if (g == n) {
      // Batched gcd overshot the collision; replay one step at a time.
      do {
        ys = (ys * ys + c) % n;
        BigInt diff = abs(x - ys);
        mpz_gcd(g.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
      } while (g == 1);
    }
    if (g != n && g != 1) return g;
    // This polynomial failed; retry with the next constant.
  }
  return BigInt(0);
}

}  // namespace

PartialFactorization factor_big(const BigInt& n, const FactorEffort& effort) {
  if (n < 1) throw std::invalid_argument("factor_big: n must be >= 1");
  PartialFactorization out;
  if (n == 1) return out;

  std::vector<FactoredNat::Term> found;
  BigInt m = n;
  auto strip = [&](Nat d) {
    std::int64_t e = 0;
    while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(d))) {
      mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(d));
      ++e;
    }
    if (e > 0) found.push_back({d, e});
  };
  strip(2);
  for (Nat d = 3; d <= effort.trial_bound && m > 1; d += 2) {
    BigInt dd(static_cast<unsigned long>(d));
    if (dd * dd > m) break;
    strip(d);
  }
  if (m > 1 && m <= effort.trial_bound * BigInt(effort.trial_bound) &&
      mpz_fits_ulong_p(m.get_mpz_t())) {
    // No factor below the trial bound and m <= bound^2: m is prime.
    found.push_back({m.get_ui(), 1});
    m = 1;
  }

  // Split the remainder with rho; certified primes are absorbed.
  std::vector<std::pair<BigInt, std::int64_t>> pending;
  if (m > 1) pending.push_back({m, 1});
  std::vector<std::pair<BigInt, std::int64_t>> unresolved;
  while (!pending.empty()) {
    auto [c, mult] = pending.back();
    pending.pop_back();
    if (c < kMillerRabinCertifiedBound && miller_rabin_certified(c)) {
      if (mpz_fits_ulong_p(c.get_mpz_t())) {
        found.push_back({c.get_ui(), mult});
      } else {
        unresolved.push_back({c, mult});  // certified prime, key too large
      }
      continue;
    }
    if (mpz_sizeinbase(c.get_mpz_t(), 2) > effort.rho_bit_limit) {
      unresolved.push_back({c, mult});
      continue;
    }
    if (c >= kMillerRabinCertifiedBound) {
      // Might still be split below, but a "probable prime" verdict cannot be
      // certified; give rho a chance and park the piece on failure.
      if (mpz_probab_prime_p(c.get_mpz_t(), 32) != 0) {
        unresolved.push_back({c, mult});
        continue;
      }
    }
    if (mpz_perfect_power_p(c.get_mpz_t())) {
      for (unsigned long k = 2;; ++k) {
        BigInt root;
        if (mpz_root(root.get_mpz_t(), c.get_mpz_t(), k) != 0) {
          pending.push_back({root, mult * static_cast<std::int64_t>(k)});
          break;
        }
      }
      continue;
    }
    std::uint64_t budget = effort.rho_iterations;
    BigInt d = pollard_rho_brent(c, budget);
    if (d == 0) {
      unresolved.push_back({c, mult});
      continue;
    }
    pending.push_back({d, mult});
    pending.push_back({c / d, mult});
  }

  out.factored_part = FactoredNat::from_terms(std::move(found));
  if (unresolved.empty()) {
    out.cofactor = 1;
  } else if (unresolved.size() == 1 && unresolved[0].second == 1 &&
             unresolved[0].first < kMillerRabinCertifiedBound) {
    out.cofactor = unresolved[0].first;
    out.cofactor_is_prime = true;  // certified above, just unabsorbable
  } else {
    out.cofactor = 1;
    for (const auto& [c, mult] : unresolved)
      for (std::int64_t i = 0; i < mult; ++i) out.cofactor *= c;
    out.cofactor_is_prime = false;
  }
  return out;
}

namespace {

template <class Terms>
std::string terms_to_json(const Terms& terms) {
  std::string s = "{";
  bool first = true;
  for (const auto& [p, e] : terms) {
    if (!first) s += ",";
    first = false;
    s += "\"" + std::to_string(p) + "\":\"" + std::to_string(e) + "\"";
  }
  s += "}";
  return s;
}

template <class Terms>
std::string terms_to_display(const Terms& terms) {
  if (terms.empty()) return "1";
  std::string s;
  bool first = true;
  for (const auto& [p, e] : terms) {
    if (!first) s += " * ";
    first = false;
    s += std::to_string(p);
    if (e != 1) s += "^" + std::to_string(e);
  }
  return s;
}

}  // namespace

std::string to_json_string(const FactoredNat& a) { return terms_to_json(a.terms()); }
std::string to_json_string(const FactoredRat& a) { return terms_to_json(a.terms()); }
std::string to_display_string(const FactoredNat& a) { return terms_to_display(a.terms()); }
std::string to_display_string(const FactoredRat& a) { return terms_to_display(a.terms()); }

}  // namespace facteq
