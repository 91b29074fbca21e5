#pragma once

#include <string>
#include <variant>
#include <vector>

#include "facteq/bhargava.hpp"
#include "facteq/common.hpp"
#include "facteq/factored.hpp"
#include "facteq/primes.hpp"

namespace facteq {

// alpha * m_1!_{S_1} ... m_r!_{S_r} = f(n!), f in {phi, sigma_k}.
struct EquationSpec {
  enum class Func { Phi, Sigma };

  Func func = Func::Phi;
  Nat k = 0;                  // Sigma order; unused for Phi
  FactoredRat alpha;          // positive, lowest terms by construction
  std::vector<SetSpec> sets;  // length r >= 1; closed-form kinds only

  static EquationSpec phi(Nat alpha_num, Nat alpha_den, std::vector<SetSpec> sets);
  static EquationSpec sigma(Nat k, Nat alpha_num, Nat alpha_den,
                            std::vector<SetSpec> sets);

  std::size_t r() const { return sets.size(); }
  // sigma_k with k >= 1 has no fully factored rhs; phi and sigma_0 do.
  bool hybrid_rhs() const { return func == Func::Sigma && k >= 1; }
  // "a/b" in lowest terms, "a" when b = 1.
  std::string alpha_string() const;
  std::string func_string() const;  // "phi" or "sigma_k"
};

struct NotInteger {};

// Value of alpha * prod m_i!_{S_i}; NotInteger when alpha's denominator
// does not cancel.
std::variant<FactoredNat, NotInteger> lhs_value(const EquationSpec& spec,
                                                const std::vector<Nat>& m,
                                                const PrimeSieve& sieve);

struct SearchCaps {
  Nat m_cap = 0;  // 0: derive from size inversion (search stays complete)
  Nat bit_cap = kDefaultBitCap;
};

struct SolveStats {
  Nat nodes = 0;
  Nat div_prunes = 0;
  Nat window_prunes = 0;
  Nat leaf_checks = 0;

  SolveStats& operator+=(const SolveStats& o) {
    nodes += o.nodes;
    div_prunes += o.div_prunes;
    window_prunes += o.window_prunes;
    leaf_checks += o.leaf_checks;
    return *this;
  }
};

struct SolveResult {
  std::vector<std::vector<Nat>> tuples;  // each ascending; list lexicographic
  bool complete = true;                  // false iff an explicit cap was binding
  SolveStats stats;
};

// All tuples m_1 <= ... <= m_r with lhs_value = f(n!).
SolveResult solve_for_n(const EquationSpec& spec, Nat n, const PrimeSieve& sieve,
                        const SearchCaps& caps = {});

struct SolutionRecord {
  Nat n = 0;
  std::vector<Nat> m;
  std::string lhs_certificate;  // factored JSON, or "fnv1a64:<hex>" digest
  std::string rhs_certificate;
};

struct SearchReport {
  EquationSpec spec;
  Nat n_min = 1;
  Nat n_max = 0;
  std::vector<SolutionRecord> solutions;          // ascending (n, m)
  std::vector<std::pair<Nat, SolveStats>> per_n;  // ascending n
  std::vector<Nat> incomplete_n;                  // caps cut these off
  bool all_verified = false;
  double wall_seconds = 0.0;  // never serialized; reports must be reproducible
};

// Aggregates solve_for_n over n = 1..n_max and re-verifies every solution.
SearchReport search(const EquationSpec& spec, Nat n_max, const PrimeSieve& sieve,
                    const SearchCaps& caps = {}, unsigned workers = 1);

// Independent big-integer re-check of one record (expansions under bit cap).
bool verify_solution(const EquationSpec& spec, Nat n, const std::vector<Nat>& m,
                     const PrimeSieve& sieve, const SearchCaps& caps = {});

std::string report_to_json(const SearchReport& report);
std::string report_to_csv(const SearchReport& report);

}  // namespace facteq
