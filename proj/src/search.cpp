#include "facteq/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "facteq/arithfun.hpp"
#include "facteq/valuations.hpp"

namespace facteq {

namespace {

// Log comparisons are screens only; equality is always settled exactly.
// Slot logs carry compensated-summation error well under 1e-6 even at
// sums ~1e6, and consecutive factorial values differ by >= ln 2, so 1e-4
// is safely between the two scales.
constexpr double kLogTol = 1e-4;

void validate_sets(const std::vector<SetSpec>& sets) {
  if (sets.empty()) throw std::invalid_argument("EquationSpec: need r >= 1 sets");
  for (const auto& s : sets)
    if (!s.has_closed_form())
      throw std::invalid_argument("EquationSpec: explicit sets are not searchable");
}

}  // namespace

EquationSpec EquationSpec::phi(Nat alpha_num, Nat alpha_den,
                               std::vector<SetSpec> sets) {
  validate_sets(sets);
  EquationSpec spec;
  spec.func = Func::Phi;
  spec.alpha = FactoredRat::from_fraction(alpha_num, alpha_den);
  spec.sets = std::move(sets);
  return spec;
}

EquationSpec EquationSpec::sigma(Nat k, Nat alpha_num, Nat alpha_den,
                                 std::vector<SetSpec> sets) {
  validate_sets(sets);
  EquationSpec spec;
  spec.func = Func::Sigma;
  spec.k = k;
  spec.alpha = FactoredRat::from_fraction(alpha_num, alpha_den);
  spec.sets = std::move(sets);
  return spec;
}

std::string EquationSpec::alpha_string() const {
  BigInt num = expand(alpha.numerator());
  BigInt den = expand(alpha.denominator());
  std::string s = num.get_str();
  if (den != 1) s += "/" + den.get_str();
  return s;
}

std::string EquationSpec::func_string() const {
  if (func == Func::Phi) return "phi";
  return "sigma_" + std::to_string(k);
}

std::variant<FactoredNat, NotInteger> lhs_value(const EquationSpec& spec,
                                                const std::vector<Nat>& m,
                                                const PrimeSieve& sieve) {
  if (m.size() != spec.r())
    throw std::invalid_argument("lhs_value: tuple length must equal r");
  FactoredRat acc = spec.alpha;
  for (std::size_t i = 0; i < m.size(); ++i)
    acc = mul(acc, bhargava_closed(m[i], spec.sets[i], sieve));
  if (!acc.is_integer()) return NotInteger{};
  return acc.to_nat();
}

namespace {

// Per-slot profile of g(m) = m!_S: cheap monotone summaries (log, log2,
// nu_2) as flat arrays, with the factored value built on demand. Arrays are
// grown once up front so the per-n sweep can share them read-only.
class SlotProfile {
 public:
  void init(const SetSpec& set, const PrimeSieve& sieve) {
    set_ = set;
    sieve_ = &sieve;
    logs_ = {0.0};
    log2s_ = {0.0};
    nu2s_ = {0};
    if (set.kind == SetSpec::Kind::ArithProg) {
      if (set.s > sieve.limit())
        throw std::invalid_argument("search: AP stride exceeds sieve limit");
      log_s_ = std::log(static_cast<double>(set.s));
      Nat s = set.s;
      while (s % 2 == 0) {
        s /= 2;
        ++nu2_s_;
      }
    }
  }

  Nat capacity() const {
    return set_.kind == SetSpec::Kind::Squares ? sieve_->limit() / 2
                                               : sieve_->limit();
  }

  // Extends the arrays until log g(m) > log_bound or capacity is reached.
  // Returns false on a capacity stop.
  bool extend_past(double log_bound) {
    while (logs_.back() <= log_bound) {
      Nat m = logs_.size();
      if (m > capacity()) return false;
      double lg = 0.0, lg2 = 0.0;
      std::int64_t nu2 = 0;
      switch (set_.kind) {
        case SetSpec::Kind::Integers:
          add(std::log(static_cast<double>(m)));
          lg = lfact_;
          nu2 = static_cast<std::int64_t>(legendre(m, 2));
          break;
        case SetSpec::Kind::ArithProg:
          add(std::log(static_cast<double>(m)));
          lg = lfact_ + static_cast<double>(m) * log_s_;
          nu2 = static_cast<std::int64_t>(legendre(m, 2)) +
                static_cast<std::int64_t>(m) * nu2_s_;
          break;
        case SetSpec::Kind::Squares:
          add(std::log(static_cast<double>(2 * m - 1)));
          add(std::log(static_cast<double>(2 * m)));
          lg = lfact_ - std::log(2.0);
          nu2 = static_cast<std::int64_t>(legendre(2 * m, 2)) - 1;
          break;
        case SetSpec::Kind::Explicit:
          throw std::logic_error("SlotProfile: explicit set");
      }
      lg2 = lg / std::log(2.0);
      logs_.push_back(lg);
      log2s_.push_back(lg2);
      nu2s_.push_back(nu2);
    }
    return true;
  }

  Nat max_m() const { return logs_.size() - 1; }
  double log_at(Nat m) const { return logs_[m]; }
  double log2_at(Nat m) const { return log2s_[m]; }
  std::int64_t nu2_at(Nat m) const { return nu2s_[m]; }
  FactoredNat value(Nat m) const { return bhargava_closed(m, set_, *sieve_); }

 private:
  // Kahan step; keeps lfact_ error near eps * |sum| across ~1e5 terms.
  void add(double x) {
    double y = x - comp_;
    double t = lfact_ + y;
    comp_ = (t - lfact_) - y;
    lfact_ = t;
  }

  SetSpec set_;
  const PrimeSieve* sieve_ = nullptr;
  std::vector<double> logs_, log2s_;
  std::vector<std::int64_t> nu2s_;
  double lfact_ = 0.0;  // ln m! (ln (2m)! for squares)
  double comp_ = 0.0;
  double log_s_ = 0.0;
  std::int64_t nu2_s_ = 0;
};

struct EqContext {
  EquationSpec spec;
  const PrimeSieve* sieve = nullptr;
  SearchCaps caps;
  std::vector<SlotProfile> slots;
  FactoredRat alpha_inv;  // 1/alpha
  BigInt a_num = 1, a_den = 1;
  bool capacity_limited = false;

  void init(const EquationSpec& s, const PrimeSieve& sv, const SearchCaps& c) {
    spec = s;
    sieve = &sv;
    caps = c;
    slots.resize(s.r());
    for (std::size_t i = 0; i < s.r(); ++i) slots[i].init(s.sets[i], sv);
    std::vector<FactoredRat::Term> inv;
    for (const auto& [p, e] : s.alpha.terms()) inv.push_back({p, -e});
    alpha_inv = FactoredRat::from_terms(std::move(inv));
    a_num = expand(s.alpha.numerator());
    a_den = expand(s.alpha.denominator());
  }

  // Cover every target with log value <= log_bound.
  void prepare(double log_bound) {
    for (auto& sl : slots)
      if (!sl.extend_past(log_bound + 1.0)) capacity_limited = true;
  }
};

// Largest m in [1, cap] with g(m) <= target (exact), 0 when none. logs
// separate neighbors by >= ln 2, so at most one candidate needs the exact
// comparison.
Nat invert_leq(const SlotProfile& sl, const FactoredNat& target, double log_t,
               Nat cap) {
  if (cap < 1) return 0;
  if (sl.log_at(1) > log_t + kLogTol) return 0;
  Nat lo = 1, hi = cap;
  while (lo < hi) {
    Nat mid = lo + (hi - lo + 1) / 2;
    if (sl.log_at(mid) <= log_t + kLogTol)
      lo = mid;
    else
      hi = mid - 1;
  }
  if (sl.log_at(lo) >= log_t - kLogTol &&
      compare_values(sl.value(lo), target) == std::strong_ordering::greater)
    return lo - 1;
  return lo;
}

// Recursive descent for fully factored targets (phi, sigma_0).
struct FactoredDfs {
  const EqContext* cx;
  SolveStats stats;
  std::vector<std::vector<Nat>> out;
  std::vector<Nat> cur;
  bool capped = false;

  void run(const FactoredNat& target) {
    cur.assign(cx->spec.r(), 0);
    std::size_t r = cx->spec.r();
    Nat bound = cx->caps.m_cap ? cx->caps.m_cap
                               : std::numeric_limits<Nat>::max();
    descend(r, target, target.log_value(), bound, cx->caps.m_cap != 0);
  }

  void descend(std::size_t i, const FactoredNat& target, double log_t,
               Nat bound, bool bound_is_cap) {
    const SlotProfile& sl = cx->slots[i - 1];
    Nat cap = std::min<Nat>(bound, sl.max_m());
    Nat u = invert_leq(sl, target, log_t, cap);
    if (u == 0) return;
    if (u == cap && (cap < bound || bound_is_cap)) capped = true;
    if (i == 1) {
      stats.nodes += 1;
      stats.leaf_checks += 1;
      // g strictly increasing: u is the only possible match
      if (std::abs(sl.log_at(u) - log_t) <= kLogTol && sl.value(u) == target) {
        cur[0] = u;
        out.push_back(cur);
      }
      return;
    }
    for (Nat mi = u; mi >= 1; --mi) {
      stats.nodes += 1;
      // all remaining m_j <= mi, so this caps the reachable product
      double hi_log = 0.0;
      for (std::size_t j = 0; j < i; ++j)
        hi_log += cx->slots[j].log_at(std::min(mi, cx->slots[j].max_m()));
      if (hi_log < log_t - kLogTol) {
        stats.window_prunes += 1;
        break;
      }
      auto q = div_exact(target, sl.value(mi));
      if (std::holds_alternative<NotDivisible>(q)) {
        stats.div_prunes += 1;
        continue;
      }
      cur[i - 1] = mi;
      descend(i - 1, std::get<FactoredNat>(q), log_t - sl.log_at(mi), mi, false);
    }
  }
};

// Recursive descent for big-integer sigma_k targets: nu_2 and bit-size
// windows prune; leaves settle by exact expansion.
struct HybridDfs {
  const EqContext* cx;
  const BigInt* target;
  double log2_t = 0.0;
  std::int64_t nu2_t = 0;
  SolveStats stats;
  std::vector<std::vector<Nat>> out;
  std::vector<Nat> cur;
  bool capped = false;

  void run() {
    cur.assign(cx->spec.r(), 0);
    Nat bound = cx->caps.m_cap ? cx->caps.m_cap
                               : std::numeric_limits<Nat>::max();
    descend(cx->spec.r(), FactoredNat{}, 0.0, 0, bound, cx->caps.m_cap != 0);
  }

  // Largest m in [1, cap] whose minimal completion still fits under the
  // target: acc2 + log2 g(m) + sum of slot minima <= log2_t + tol.
  Nat start_m(std::size_t i, double acc2, Nat cap) const {
    const SlotProfile& sl = cx->slots[i - 1];
    double rest_min = 0.0;
    for (std::size_t j = 0; j + 1 < i; ++j) rest_min += cx->slots[j].log2_at(1);
    double room = log2_t + kLogTol - acc2 - rest_min;
    if (cap < 1 || sl.log2_at(1) > room) return 0;
    Nat lo = 1, hi = cap;
    while (lo < hi) {
      Nat mid = lo + (hi - lo + 1) / 2;
      if (sl.log2_at(mid) <= room)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo;
  }

  void descend(std::size_t i, const FactoredNat& prod, double acc2,
               std::int64_t acc_nu, Nat bound, bool bound_is_cap) {
    const SlotProfile& sl = cx->slots[i - 1];
    Nat cap = std::min<Nat>(bound, sl.max_m());
    Nat u = start_m(i, acc2, cap);
    if (u == 0) return;
    if (u == cap && (cap < bound || bound_is_cap)) capped = true;
    for (Nat mi = u; mi >= 1; --mi) {
      stats.nodes += 1;
      double hi2 = acc2;
      std::int64_t hi_nu = acc_nu;
      for (std::size_t j = 0; j < i; ++j) {
        Nat mj = std::min(mi, cx->slots[j].max_m());
        hi2 += cx->slots[j].log2_at(mj);
        hi_nu += cx->slots[j].nu2_at(mj);
      }
      if (hi2 < log2_t - kLogTol) {
        stats.window_prunes += 1;
        break;
      }
      std::int64_t lo_nu = acc_nu + sl.nu2_at(mi);
      for (std::size_t j = 0; j + 1 < i; ++j) lo_nu += cx->slots[j].nu2_at(1);
      if (hi_nu < nu2_t) {
        stats.window_prunes += 1;
        break;  // hi_nu only shrinks as mi decreases
      }
      if (lo_nu > nu2_t) {
        stats.window_prunes += 1;
        continue;
      }
      if (i == 1) {
        if (std::abs(acc2 + sl.log2_at(mi) - log2_t) > kLogTol) continue;
        stats.leaf_checks += 1;
        FactoredNat full = mul(prod, sl.value(mi));
        if (expand(full, cx->caps.bit_cap) == *target) {
          cur[0] = mi;
          out.push_back(cur);
        }
        continue;
      }
      cur[i - 1] = mi;
      descend(i - 1, mul(prod, sl.value(mi)), acc2 + sl.log2_at(mi),
              acc_nu + sl.nu2_at(mi), mi, false);
    }
  }
};

double bigint_log2(const BigInt& v) {
  long exp = 0;
  double d = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::log2(d) + static_cast<double>(exp);
}

FactoredNat factored_rhs(const EquationSpec& spec, Nat n, const PrimeSieve& sieve) {
  return spec.func == EquationSpec::Func::Phi ? phi_factorial(n, sieve)
                                              : sigma0_factorial(n, sieve);
}

SolveResult solve_one(const EqContext& cx, Nat n) {
  SolveResult res;
  if (!cx.spec.hybrid_rhs()) {
    FactoredNat rhs = factored_rhs(cx.spec, n, *cx.sieve);
    FactoredRat t = mul(cx.alpha_inv, rhs);
    if (!t.is_integer()) return res;
    FactoredNat target = t.to_nat();
    double log_t = target.log_value();
    for (const auto& sl : cx.slots)
      if (sl.log_at(sl.max_m()) <= log_t + kLogTol) res.complete = false;
    FactoredDfs dfs;
    dfs.cx = &cx;
    dfs.run(target);
    res.tuples = std::move(dfs.out);
    res.stats = dfs.stats;
    if (dfs.capped) res.complete = false;
  } else {
    BigInt v = sigma_k_value(n, cx.spec.k, *cx.sieve);
    BigInt t = v * cx.a_den;
    if (!mpz_divisible_p(t.get_mpz_t(), cx.a_num.get_mpz_t())) return res;
    mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), cx.a_num.get_mpz_t());
    HybridDfs dfs;
    dfs.cx = &cx;
    dfs.target = &t;
    dfs.log2_t = bigint_log2(t);
    dfs.nu2_t = t == 1 ? 0
                       : static_cast<std::int64_t>(
                             mpz_scan1(t.get_mpz_t(), 0));
    double log_t = dfs.log2_t * std::log(2.0);
    for (const auto& sl : cx.slots)
      if (sl.log_at(sl.max_m()) <= log_t + kLogTol) res.complete = false;
    dfs.run();
    res.tuples = std::move(dfs.out);
    res.stats = dfs.stats;
    if (dfs.capped) res.complete = false;
  }
  std::sort(res.tuples.begin(), res.tuples.end());
  return res;
}

std::string fnv1a64_digest(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

// lhs as an exact big integer: alpha * prod m_i!_{S_i}
BigInt lhs_bigint(const EqContext& cx, const std::vector<Nat>& m, Nat bit_cap) {
  FactoredNat prod;
  for (std::size_t i = 0; i < m.size(); ++i)
    prod = mul(prod, bhargava_closed(m[i], cx.spec.sets[i], *cx.sieve));
  BigInt value = expand(prod, bit_cap) * cx.a_num;
  if (!mpz_divisible_p(value.get_mpz_t(), cx.a_den.get_mpz_t()))
    throw std::logic_error("lhs_bigint: recorded solution is not an integer");
  mpz_divexact(value.get_mpz_t(), value.get_mpz_t(), cx.a_den.get_mpz_t());
  return value;
}

SolutionRecord make_record(const EqContext& cx, Nat n, const std::vector<Nat>& m) {
  SolutionRecord rec;
  rec.n = n;
  rec.m = m;
  if (!cx.spec.hybrid_rhs()) {
    auto lhs = lhs_value(cx.spec, m, *cx.sieve);
    rec.lhs_certificate = to_json_string(std::get<FactoredNat>(lhs));
    rec.rhs_certificate = to_json_string(factored_rhs(cx.spec, n, *cx.sieve));
  } else {
    BigInt lhs = lhs_bigint(cx, m, cx.caps.bit_cap);
    BigInt rhs = sigma_k_value(n, cx.spec.k, *cx.sieve);
    rec.lhs_certificate = fnv1a64_digest(lhs.get_str());
    rec.rhs_certificate = fnv1a64_digest(rhs.get_str());
  }
  return rec;
}

}  // namespace

SolveResult solve_for_n(const EquationSpec& spec, Nat n, const PrimeSieve& sieve,
                        const SearchCaps& caps) {
  if (n < 1) throw std::invalid_argument("solve_for_n: n must be >= 1");
  if (n > sieve.limit())
    throw std::invalid_argument("solve_for_n: n exceeds sieve limit");
  EqContext cx;
  cx.init(spec, sieve, caps);
  double log_bound;
  if (!spec.hybrid_rhs()) {
    log_bound = factored_rhs(spec, n, sieve).log_value();
  } else {
    log_bound = bigint_log2(sigma_k_value(n, spec.k, sieve)) * std::log(2.0);
  }
  log_bound += std::log(std::max(1.0, cx.a_den.get_d()));
  cx.prepare(log_bound);
  return solve_one(cx, n);
}

bool verify_solution(const EquationSpec& spec, Nat n, const std::vector<Nat>& m,
                     const PrimeSieve& sieve, const SearchCaps& caps) {
  EqContext cx;
  cx.init(spec, sieve, caps);
  BigInt lhs;
  try {
    lhs = lhs_bigint(cx, m, caps.bit_cap);
  } catch (const ResourceError&) {
    // expansion does not fit the bit cap: fall back to factored equality
    auto lv = lhs_value(spec, m, sieve);
    if (std::holds_alternative<NotInteger>(lv)) return false;
    if (spec.hybrid_rhs()) return false;  // cannot verify without expansion
    return std::get<FactoredNat>(lv) == factored_rhs(spec, n, sieve);
  } catch (const std::logic_error&) {
    return false;
  }
  if (!spec.hybrid_rhs()) {
    BigInt rhs = expand(factored_rhs(spec, n, sieve), caps.bit_cap);
    return lhs == rhs;
  }
  return lhs == sigma_k_value(n, spec.k, sieve);
}

SearchReport search(const EquationSpec& spec, Nat n_max, const PrimeSieve& sieve,
                    const SearchCaps& caps, unsigned workers) {
  if (n_max < 1) throw std::invalid_argument("search: n_max must be >= 1");
  if (n_max > sieve.limit())
    throw std::invalid_argument("search: n_max exceeds sieve limit");
  auto t0 = std::chrono::steady_clock::now();

  EqContext cx;
  cx.init(spec, sieve, caps);
  // targets grow with n, so covering n_max covers the whole sweep
  double log_bound;
  if (!spec.hybrid_rhs()) {
    log_bound = factored_rhs(spec, n_max, sieve).log_value();
  } else {
    log_bound = bigint_log2(sigma_k_value(n_max, spec.k, sieve)) * std::log(2.0);
  }
  log_bound += std::log(std::max(1.0, cx.a_den.get_d()));
  cx.prepare(log_bound);

  std::vector<SolveResult> results(n_max);
  parallel_for(1, n_max + 1, workers,
               [&](Nat n) { results[n - 1] = solve_one(cx, n); });

  SearchReport report;
  report.spec = spec;
  report.n_min = 1;
  report.n_max = n_max;
  report.all_verified = true;
  for (Nat n = 1; n <= n_max; ++n) {
    const SolveResult& res = results[n - 1];
    report.per_n.push_back({n, res.stats});
    if (!res.complete) report.incomplete_n.push_back(n);
    for (const auto& tuple : res.tuples) {
      report.solutions.push_back(make_record(cx, n, tuple));
      if (!verify_solution(spec, n, tuple, sieve, caps))
        report.all_verified = false;
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

std::string report_to_json(const SearchReport& report) {
  using ordered_json = nlohmann::ordered_json;
  ordered_json j;
  j["schema"] = "facteq.search.v1";
  ordered_json eq;
  eq["f"] = report.spec.func_string();
  eq["alpha"] = report.spec.alpha_string();
  eq["r"] = report.spec.r();
  std::vector<std::string> sets;
  for (const auto& s : report.spec.sets) sets.push_back(s.to_string());
  eq["sets"] = sets;
  eq["m_convention"] = "m_i >= 1, tuples ascending";
  j["equation"] = eq;
  j["n_range"] = {report.n_min, report.n_max};
  ordered_json sols = ordered_json::array();
  for (const auto& rec : report.solutions) {
    ordered_json s;
    s["n"] = rec.n;
    s["m"] = rec.m;
    auto cert = [](const std::string& c) -> ordered_json {
      if (!c.empty() && c[0] == '{') return ordered_json::parse(c);
      return c;
    };
    s["lhs_certificate"] = cert(rec.lhs_certificate);
    s["rhs_certificate"] = cert(rec.rhs_certificate);
    sols.push_back(s);
  }
  j["solutions"] = sols;
  j["incomplete_n"] = report.incomplete_n;
  SolveStats agg;
  for (const auto& [n, st] : report.per_n) agg += st;
  j["stats"] = {{"nodes", agg.nodes},
                {"div_prunes", agg.div_prunes},
                {"window_prunes", agg.window_prunes},
                {"leaf_checks", agg.leaf_checks}};
  j["all_verified"] = report.all_verified;
  return j.dump(2) + "\n";
}

std::string report_to_csv(const SearchReport& report) {
  std::string out = "n";
  for (std::size_t i = 1; i <= report.spec.r(); ++i)
    out += ",m" + std::to_string(i);
  out += "\n";
  for (const auto& rec : report.solutions) {
    out += std::to_string(rec.n);
    for (Nat mi : rec.m) out += "," + std::to_string(mi);
    out += "\n";
  }
  return out;
}

}  // namespace facteq
