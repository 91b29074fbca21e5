#include "facteq/bhargava.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "facteq/valuations.hpp"

namespace facteq {

SetSpec SetSpec::integers() { return SetSpec{}; }

SetSpec SetSpec::arith_prog(Nat s, std::int64_t t) {
  if (s < 1) throw std::invalid_argument("SetSpec: stride must be >= 1");
  SetSpec spec;
  spec.kind = Kind::ArithProg;
  spec.s = s;
  spec.t = t;
  return spec;
}

SetSpec SetSpec::squares() {
  SetSpec spec;
  spec.kind = Kind::Squares;
  return spec;
}

SetSpec SetSpec::explicit_set(std::vector<std::int64_t> elems) {
  if (elems.empty())
    throw std::invalid_argument("SetSpec: explicit set must be nonempty");
  if (!std::is_sorted(elems.begin(), elems.end()) ||
      std::adjacent_find(elems.begin(), elems.end()) != elems.end())
    throw std::invalid_argument("SetSpec: explicit elements must be strictly ascending");
  SetSpec spec;
  spec.kind = Kind::Explicit;
  spec.elements = std::move(elems);
  return spec;
}

SetSpec SetSpec::parse(const std::string& text) {
  if (text == "Z") return integers();
  if (text == "squares") return squares();
  auto parse_i64_list = [](const std::string& body) {
    std::vector<std::int64_t> vals;
    std::size_t pos = 0;
    while (pos < body.size()) {
      std::size_t used = 0;
      vals.push_back(std::stoll(body.substr(pos), &used));
      pos += used;
      if (pos < body.size()) {
        if (body[pos] != ',') throw std::invalid_argument("SetSpec: expected ','");
        ++pos;
      }
    }
    return vals;
  };
  if (text.rfind("ap:", 0) == 0) {
    auto vals = parse_i64_list(text.substr(3));
    if (vals.size() != 2)
      throw std::invalid_argument("SetSpec: ap wants exactly s,t");
    if (vals[0] < 1) throw std::invalid_argument("SetSpec: stride must be >= 1");
    return arith_prog(static_cast<Nat>(vals[0]), vals[1]);
  }
  if (text.rfind("explicit:", 0) == 0)
    return explicit_set(parse_i64_list(text.substr(9)));
  throw std::invalid_argument("SetSpec: cannot parse '" + text + "'");
}

std::string SetSpec::to_string() const {
  switch (kind) {
    case Kind::Integers:
      return "Z";
    case Kind::ArithProg:
      return "ap:" + std::to_string(s) + "," + std::to_string(t);
    case Kind::Squares:
      return "squares";
    case Kind::Explicit: {
      std::string out = "explicit:";
      for (std::size_t i = 0; i < elements.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(elements[i]);
      }
      return out;
    }
  }
  throw std::logic_error("SetSpec: bad kind");
}

FactoredNat bhargava_closed(Nat m, const SetSpec& spec, const PrimeSieve& sieve) {
  switch (spec.kind) {
    case SetSpec::Kind::Integers:
      return factorial_factored(m, sieve);
    case SetSpec::Kind::ArithProg:
      return mul(factor_small(spec.s, sieve).pow(m), factorial_factored(m, sieve));
    case SetSpec::Kind::Squares: {
      if (m == 0) return FactoredNat{};  // (2m)!/2 breaks down; 0!_S = 1
      auto v = div_exact(factorial_factored(2 * m, sieve),
                         FactoredNat::prime_power(2, 1));
      return std::get<FactoredNat>(v);
    }
    case SetSpec::Kind::Explicit:
      throw std::invalid_argument(
          "bhargava_closed: explicit sets have no closed form");
  }
  throw std::logic_error("bhargava_closed: bad kind");
}

namespace {

std::int64_t nu_p_diff(std::int64_t a, std::int64_t b, Nat p) {
  // cast before subtracting: |a - b| can exceed the signed range
  std::uint64_t d = a >= b
                        ? static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b)
                        : static_cast<std::uint64_t>(b) - static_cast<std::uint64_t>(a);
  std::int64_t e = 0;
  while (d % p == 0) {
    d /= p;
    ++e;
  }
  return e;
}

// nu_m of the finite set T at prime p, by greedy p-ordering. At each step the
// point of minimal accumulated valuation is taken; the recorded minima do not
// depend on tie-breaking.
std::int64_t greedy_nu_m(const std::vector<std::int64_t>& T, Nat m, Nat p) {
  std::size_t n = T.size();
  std::vector<std::int64_t> val(n, 0);
  std::vector<char> used(n, 0);
  std::int64_t last = 0;
  for (Nat k = 0; k <= m; ++k) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && (best == n || val[i] < val[best])) best = i;
    last = val[best];
    used[best] = 1;
    if (k == m) break;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i]) val[i] += nu_p_diff(T[i], T[best], p);
  }
  return last;
}

// If the first m+1 elements are pairwise distinct mod p, that tuple has a
// difference product of valuation zero, forcing nu_m = 0.
bool head_residues_distinct(const std::vector<std::int64_t>& T, Nat m, Nat p) {
  std::unordered_set<Nat> seen;
  for (Nat i = 0; i <= m; ++i) {
    std::int64_t r = T[i] % static_cast<std::int64_t>(p);
    if (r < 0) r += static_cast<std::int64_t>(p);
    if (!seen.insert(static_cast<Nat>(r)).second) return false;
  }
  return true;
}

// One engine round over the prefix T[0..count).
FactoredNat nu_product(const std::vector<std::int64_t>& T, std::size_t count,
                       Nat m, const PrimeSieve& sieve) {
  std::vector<std::int64_t> prefix(T.begin(), T.begin() + count);
  // Any prime with nu_m > 0 divides a difference among the first m+1
  // elements, so T[m] - T[0] bounds the candidate primes.
  Nat D = static_cast<std::uint64_t>(prefix[m]) -
          static_cast<std::uint64_t>(prefix[0]);
  if (D > sieve.limit())
    throw ResourceError("bhargava_general: candidate prime bound " +
                        std::to_string(D) + " exceeds sieve limit");
  std::vector<FactoredNat::Term> terms;
  for (Nat p : sieve.primes()) {
    if (p > D) break;
    if (head_residues_distinct(prefix, m, p)) continue;
    std::int64_t e = greedy_nu_m(prefix, m, p);
    if (e > 0) terms.push_back({p, e});
  }
  return FactoredNat::from_terms(std::move(terms));
}

}  // namespace

FactoredNat bhargava_general(const std::vector<std::int64_t>& elements, Nat m,
                             const PrimeSieve& sieve, Nat stability_doublings,
                             StabilityReport* report) {
  if (!std::is_sorted(elements.begin(), elements.end()) ||
      std::adjacent_find(elements.begin(), elements.end()) != elements.end())
    throw std::invalid_argument("bhargava_general: elements must be strictly ascending");
  StabilityReport local;
  StabilityReport& rep = report ? *report : local;
  rep = StabilityReport{};
  if (m == 0) {
    rep.elements_used = elements.empty() ? 0 : 1;
    return FactoredNat{};
  }
  if (elements.size() < m + 1)
    throw std::invalid_argument("bhargava_general: need at least m+1 elements");

  std::size_t count = std::min<std::size_t>(elements.size(), 4 * (m + 1));
  FactoredNat prev = nu_product(elements, count, m, sieve);
  rep.elements_used = count;
  if (count == elements.size()) return prev;  // nothing left to double against
  for (Nat round = 0; round < stability_doublings; ++round) {
    std::size_t next = std::min(elements.size(), count * 2);
    FactoredNat cur = nu_product(elements, next, m, sieve);
    ++rep.rounds;
    rep.elements_used = next;
    if (cur == prev) return cur;
    prev = std::move(cur);
    if (next == elements.size()) break;  // list exhausted before agreement
    count = next;
  }
  rep.stable = false;
  return prev;
}

FactoredNat bhargava_general(Nat m, const SetSpec& spec, const PrimeSieve& sieve,
                             Nat stability_doublings, StabilityReport* report) {
  if (spec.kind == SetSpec::Kind::Explicit)
    return bhargava_general(spec.elements, m, sieve, stability_doublings, report);
  // Materialize enough of the set for every round up front.
  std::size_t count = 4 * (m + 1);
  for (Nat i = 0; i < stability_doublings; ++i) count *= 2;
  std::vector<std::int64_t> T;
  T.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    switch (spec.kind) {
      case SetSpec::Kind::Integers:
        T.push_back(static_cast<std::int64_t>(i));
        break;
      case SetSpec::Kind::ArithProg:
        T.push_back(spec.t + static_cast<std::int64_t>(i * spec.s));
        break;
      case SetSpec::Kind::Squares:
        T.push_back(static_cast<std::int64_t>(i * i));
        break;
      case SetSpec::Kind::Explicit:
        break;  // handled above
    }
  }
  return bhargava_general(T, m, sieve, stability_doublings, report);
}

}  // namespace facteq
