// Acceptance gate: one line per criterion, nonzero exit on any failure.
// Each criterion also carries a wall-clock budget; blowing the budget fails
// the criterion even when the math checks out.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "facteq/arithfun.hpp"
#include "facteq/bhargava.hpp"
#include "facteq/lemmalab.hpp"
#include "facteq/search.hpp"
#include "facteq/valuations.hpp"
#include "golden_util.hpp"
#include "oracles.hpp"

using namespace facteq;

namespace {

int failures = 0;

void run(int id, const char* name, double budget_s,
         const std::function<bool(std::string&)>& body) {
  std::string note;
  bool ok = false;
  auto t0 = std::chrono::steady_clock::now();
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    note = std::string("exception: ") + e.what();
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    ok = false;
    note += (note.empty() ? "" : "; ") + std::string("over budget of ") +
            std::to_string(budget_s) + "s";
  }
  if (!ok) ++failures;
  std::printf("criterion %2d: %s  %7.2fs  %s%s%s\n", id, ok ? "PASS" : "FAIL", secs,
              name, note.empty() ? "" : " -- ", note.c_str());
  std::fflush(stdout);
}

char oracle_kind(const SetSpec& s) {
  if (s.kind == SetSpec::Kind::Integers) return 'Z';
  if (s.kind == SetSpec::Kind::ArithProg) return 'A';
  return 'Q';
}

}  // namespace

int main() {
  PrimeSieve sieve(1000000);

  run(1, "Legendre identity, N <= 1e5, 2 <= p <= 100", 10.0, [&](std::string& note) {
    Nat checks = 0;
    for (Nat p = 2; p <= 100; ++p)
      for (Nat N = 0; N <= 100000; ++N) {
        if (legendre(N, p) != legendre_digit(N, p)) {
          note = "mismatch at N=" + std::to_string(N) + " p=" + std::to_string(p);
          return false;
        }
        ++checks;
      }
    note = std::to_string(checks) + " checks, zero tolerance";
    return true;
  });

  run(2, "interval valuations nu_p(n!) = ell, n <= 1e4", 30.0, [&](std::string& note) {
    auto res = interval_valuation_sweep(10000, sieve);
    note = std::to_string(res.checks) + " checks, " +
           std::to_string(res.failures) + " failures";
    return res.failures == 0 && res.checks > 0 && res.max_constant == 0.0;
  });

  run(3, "nu_q(prod (p-1)) counting identity, q <= 50", 60.0, [&](std::string& note) {
    Nat checks = 0;
    for (Nat q : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47})
      for (Nat n : {1000, 10000, 100000}) {
        auto rec = nu_q_prime_product(n, q, sieve);
        if (rec.exact != rec.counting) {
          note = "mismatch at n=" + std::to_string(n) + " q=" + std::to_string(q);
          return false;
        }
        ++checks;
      }
    note = std::to_string(checks) + " (q,n) pairs, exact";
    return true;
  });

  run(4, "nu_q(prod (p-1)) ~ (q/(q-1)^2) li(n) at n = 1e6", 60.0,
      [&](std::string& note) {
        note = "ratios:";
        for (Nat q : {2, 3, 5, 7}) {
          auto rec = nu_q_prime_product(1000000, q, sieve);
          double ratio = static_cast<double>(rec.exact) / rec.main_term;
          char buf[32];
          std::snprintf(buf, sizeof buf, " q=%llu:%.6f",
                        static_cast<unsigned long long>(q), ratio);
          note += buf;
          if (!(ratio >= 0.9 && ratio <= 1.1)) return false;
        }
        return true;
      });

  run(5, "phi/sigma_k factored vs big-integer oracles, n <= 300", 60.0,
      [&](std::string& note) {
        std::map<oracle::u64, oracle::u64> fact;
        for (Nat n = 1; n <= 300; ++n) {
          for (const auto& [p, e] : oracle::factor(n)) fact[p] += e;
          if (expand(phi_factorial(n, sieve)) != oracle::phi_of(fact)) {
            note = "phi mismatch at n=" + std::to_string(n);
            return false;
          }
          if (expand(sigma0_factorial(n, sieve)) != oracle::sigma_k_of(fact, 0)) {
            note = "sigma_0 mismatch at n=" + std::to_string(n);
            return false;
          }
          for (Nat k = 1; k <= 3; ++k)
            if (sigma_k_value(n, k, sieve) != oracle::sigma_k_of(fact, k)) {
              note = "sigma_" + std::to_string(k) + " mismatch at n=" + std::to_string(n);
              return false;
            }
        }
        for (Nat n = 1; n <= 12; ++n) {
          auto f = oracle::factorial_factorization(n);
          if (expand(phi_factorial(n, sieve)) != oracle::phi_by_mobius(f)) {
            note = "Mobius phi mismatch at n=" + std::to_string(n);
            return false;
          }
          if (expand(sigma0_factorial(n, sieve)) !=
              oracle::Z(static_cast<unsigned long>(oracle::divisors(f).size()))) {
            note = "divisor-count mismatch at n=" + std::to_string(n);
            return false;
          }
          for (Nat k = 1; k <= 3; ++k)
            if (sigma_k_value(n, k, sieve) != oracle::sigma_k_by_divisors(f, k)) {
              note = "divisor-sum mismatch at n=" + std::to_string(n);
              return false;
            }
        }
        note = "n <= 300 multiplicative, n <= 12 divisor enumeration, exact";
        return true;
      });

  // The exact two-power divisor of sigma_k(n!) is sigma_k(2^nu_2(n!)) =
  // (2^{k(nu_2(n!)+1)} - 1)/(2^k - 1); at k = 1 the quotient is the plain
  // Mersenne number 2^{nu_2(n!)+1} - 1.
  run(6, "sigma_k(2^nu_2(n!)) divides sigma_k(n!), n <= 60", 30.0,
      [&](std::string& note) {
        Nat checks = 0;
        for (Nat n = 2; n <= 60; ++n)
          for (Nat k = 1; k <= 3; ++k) {
            BigInt d = (BigInt(1) << (k * (legendre(n, 2) + 1))) - 1;
            d /= (BigInt(1) << k) - 1;
            BigInt s = sigma_k_value(n, k, sieve);
            if (!mpz_divisible_p(s.get_mpz_t(), d.get_mpz_t())) {
              note = "fails at n=" + std::to_string(n) + " k=" + std::to_string(k);
              return false;
            }
            ++checks;
          }
        note = std::to_string(checks) +
               " (n,k) pairs, exact divisibility, k=1 Mersenne case included";
        return true;
      });

  run(7, "search matrix vs naive oracle, n <= 40", 300.0, [&](std::string& note) {
    // Oracle right-hand sides, accumulated once.
    const Nat n_max = 40;
    std::vector<oracle::Z> rhs_phi(n_max + 1), rhs_s0(n_max + 1), rhs_s1(n_max + 1),
        rhs_s2(n_max + 1);
    {
      std::map<oracle::u64, oracle::u64> fact;
      for (Nat n = 1; n <= n_max; ++n) {
        for (const auto& [p, e] : oracle::factor(n)) fact[p] += e;
        rhs_phi[n] = oracle::phi_of(fact);
        rhs_s0[n] = oracle::sigma_k_of(fact, 0);
        rhs_s1[n] = oracle::sigma_k_of(fact, 1);
        rhs_s2[n] = oracle::sigma_k_of(fact, 2);
      }
    }
    std::vector<SetSpec> kinds{SetSpec::integers(), SetSpec::arith_prog(2, 0),
                               SetSpec::arith_prog(3, 1), SetSpec::squares()};
    std::vector<std::pair<Nat, Nat>> alphas{{1, 1}, {2, 1}, {1, 2}, {3, 4}};
    Nat runs = 0, largest_n = 0, total_solutions = 0;
    for (std::size_t r = 1; r <= 3; ++r) {
      std::size_t seqs = 1;
      for (std::size_t i = 0; i < r; ++i) seqs *= kinds.size();
      for (std::size_t code = 0; code < seqs; ++code) {
        std::vector<SetSpec> sets;
        std::size_t c = code;
        for (std::size_t i = 0; i < r; ++i) {
          sets.push_back(kinds[c % kinds.size()]);
          c /= kinds.size();
        }
        std::vector<oracle::SlotOracle> slots;
        for (const auto& s : sets) slots.push_back({oracle_kind(s), s.s, {}});
        for (int f = 0; f < 4; ++f) {
          const std::vector<oracle::Z>* rhs = f == 0   ? &rhs_phi
                                              : f == 1 ? &rhs_s0
                                              : f == 2 ? &rhs_s1
                                                       : &rhs_s2;
          for (auto [a, b] : alphas) {
            EquationSpec spec = f == 0 ? EquationSpec::phi(a, b, sets)
                                       : EquationSpec::sigma(f - 1, a, b, sets);
            auto report = search(spec, n_max, sieve);
            ++runs;
            if (!report.incomplete_n.empty() || !report.all_verified) {
              note = "run not complete/verified: " + spec.func_string() + " alpha=" +
                     spec.alpha_string();
              return false;
            }
            std::map<Nat, std::vector<std::vector<Nat>>> got;
            for (const auto& rec : report.solutions) {
              got[rec.n].push_back(rec.m);
              largest_n = std::max(largest_n, rec.n);
              ++total_solutions;
            }
            for (Nat n = 1; n <= n_max; ++n) {
              auto want = oracle::equation_solutions((*rhs)[n], a, b, slots);
              std::vector<std::vector<Nat>> wantn;
              for (const auto& t : want) wantn.emplace_back(t.begin(), t.end());
              std::sort(wantn.begin(), wantn.end());
              auto it = got.find(n);
              const std::vector<std::vector<Nat>> empty;
              const auto& have = it == got.end() ? empty : it->second;
              if (have != wantn) {
                note = "solution sets differ: " + spec.func_string() + " alpha=" +
                       spec.alpha_string() + " r=" + std::to_string(r) + " n=" +
                       std::to_string(n);
                return false;
              }
            }
          }
        }
      }
    }
    note = std::to_string(runs) + " runs, " + std::to_string(total_solutions) +
           " solutions, all beyond n=" + std::to_string(largest_n) + " empty";
    return true;
  });

  run(8, "frozen golden solution tables", 60.0, [&](std::string& note) {
    int tables = 0;
    for (const char* name :
         {"phi_1_Z_100.json", "sigma0_1_Z_100.json", "sigma0_1_ZZ_100.json",
          "phi_1_ap2_0_100.json", "sigma1_1_Z_60.json", "phi_half_squares_60.json"}) {
      auto table = golden::load(name);
      auto report = search(table.spec, table.n_max, sieve);
      if (golden::flatten(report) != table.solutions || !report.incomplete_n.empty() ||
          !report.all_verified) {
        note = std::string("table diverges: ") + name;
        return false;
      }
      ++tables;
    }
    note = std::to_string(tables) + " tables reproduced exactly";
    return true;
  });

  run(9, "p-ordering engine vs closed forms, m <= 12", 60.0, [&](std::string& note) {
    std::vector<SetSpec> grid{SetSpec::integers(), SetSpec::squares()};
    for (Nat s = 1; s <= 5; ++s)
      for (std::int64_t t = -5; t <= 5; ++t) grid.push_back(SetSpec::arith_prog(s, t));
    Nat checks = 0;
    for (const auto& spec : grid)
      for (Nat m = 0; m <= 12; ++m) {
        StabilityReport rep;
        auto engine = bhargava_general(m, spec, sieve, 3, &rep);
        if (!rep.stable || engine != bhargava_closed(m, spec, sieve)) {
          note = "disagrees on " + spec.to_string() + " m=" + std::to_string(m);
          return false;
        }
        ++checks;
      }
    note = std::to_string(checks) + " (set,m) pairs, exact";
    return true;
  });

  run(10, "largest prime factor of 2^N - 1 exceeds N, 7 <= N <= 64", 120.0,
      [&](std::string& note) {
        auto recs = stewart_check(7, 64);
        Nat incomplete = 0;
        for (const auto& r : recs) {
          if (!r.ok) {
            note = "fails at N=" + std::to_string(r.N);
            return false;
          }
          if (!r.complete) ++incomplete;
        }
        note = std::to_string(recs.size()) + " values of N, " +
               std::to_string(incomplete) + " relying on a partial witness";
        return true;
      });

  run(11, "byte-identical reports for worker counts 1 and 8", 60.0,
      [&](std::string& note) {
        auto spec1 = EquationSpec::sigma(0, 1, 1,
                                         {SetSpec::integers(), SetSpec::arith_prog(3, 1)});
        auto spec2 = EquationSpec::phi(1, 2, {SetSpec::integers(), SetSpec::squares()});
        for (const auto& spec : {spec1, spec2}) {
          auto r1 = search(spec, 300, sieve, {}, 1);
          auto r8 = search(spec, 300, sieve, {}, 8);
          if (report_to_json(r1) != report_to_json(r8) ||
              report_to_csv(r1) != report_to_csv(r8)) {
            note = "reports differ for " + spec.func_string();
            return false;
          }
        }
        note = "json and csv byte-identical for two specs";
        return true;
      });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures;
}
