#pragma once

#include <string>
#include <vector>

#include "facteq/common.hpp"
#include "facteq/factored.hpp"
#include "facteq/primes.hpp"

namespace facteq {

// A subset of Z over which generalized factorials are taken.
struct SetSpec {
  enum class Kind { Integers, ArithProg, Squares, Explicit };

  Kind kind = Kind::Integers;
  Nat s = 1;           // ArithProg stride, >= 1
  std::int64_t t = 0;  // ArithProg offset
  std::vector<std::int64_t> elements;  // Explicit only; strictly ascending

  static SetSpec integers();
  static SetSpec arith_prog(Nat s, std::int64_t t);
  static SetSpec squares();
  static SetSpec explicit_set(std::vector<std::int64_t> elems);

  // Accepts "Z", "ap:s,t", "squares", "explicit:a,b,c".
  static SetSpec parse(const std::string& text);
  std::string to_string() const;

  bool has_closed_form() const { return kind != Kind::Explicit; }
};

// Closed forms: m!_Z = m!, m!_{sZ+t} = s^m m!, m!_{squares} = (2m)!/2.
// 0!_S = 1 for every kind. Throws std::invalid_argument for Explicit sets.
FactoredNat bhargava_closed(Nat m, const SetSpec& spec, const PrimeSieve& sieve);

// Outcome of the truncation stability protocol.
struct StabilityReport {
  bool stable = true;     // two successive rounds agreed (or no doubling ran)
  Nat rounds = 0;         // doublings performed
  Nat elements_used = 0;  // prefix length of the accepted round
};

// Greedy p-ordering engine over an ascending element list. When the list is
// longer than 4(m+1) it is treated as a truncation: rounds run on prefixes of
// doubling length, at most stability_doublings times, accepting as soon as
// two successive rounds agree. Instability is reported, not thrown.
FactoredNat bhargava_general(const std::vector<std::int64_t>& elements, Nat m,
                             const PrimeSieve& sieve,
                             Nat stability_doublings = 3,
                             StabilityReport* report = nullptr);

// Convenience: materializes a long enough truncation for the infinite kinds;
// Explicit sets are passed through whole.
FactoredNat bhargava_general(Nat m, const SetSpec& spec, const PrimeSieve& sieve,
                             Nat stability_doublings = 3,
                             StabilityReport* report = nullptr);

}  // namespace facteq
