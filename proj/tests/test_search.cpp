#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <map>
#include <stdexcept>
#include <variant>

#include "doctest.h"
#include "facteq/search.hpp"
#include "golden_util.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace facteq;

namespace {

char slot_kind(const SetSpec& s) {
  switch (s.kind) {
    case SetSpec::Kind::Integers:
      return 'Z';
    case SetSpec::Kind::ArithProg:
      return 'A';
    case SetSpec::Kind::Squares:
      return 'Q';
    default:
      throw std::logic_error("no oracle kind");
  }
}

// Reference solutions for one n, straight from big integers.
std::vector<std::vector<Nat>> oracle_tuples(const EquationSpec& spec, Nat n,
                                            Nat a, Nat b) {
  auto fact = oracle::factorial_factorization(n);
  oracle::Z rhs;
  if (spec.func == EquationSpec::Func::Phi)
    rhs = oracle::phi_of(fact);
  else
    rhs = oracle::sigma_k_of(fact, spec.k);
  std::vector<oracle::SlotOracle> slots;
  for (const auto& s : spec.sets) slots.push_back({slot_kind(s), s.s, {}});
  auto raw = oracle::equation_solutions(rhs, a, b, slots);
  std::vector<std::vector<Nat>> out;
  for (const auto& t : raw) out.emplace_back(t.begin(), t.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("spec construction and validation") {
  auto spec = EquationSpec::sigma(2, 3, 4, {SetSpec::integers()});
  CHECK(spec.alpha_string() == "3/4");
  CHECK(spec.func_string() == "sigma_2");
  CHECK(spec.hybrid_rhs());
  CHECK_FALSE(EquationSpec::phi(1, 1, {SetSpec::integers()}).hybrid_rhs());
  CHECK_FALSE(EquationSpec::sigma(0, 1, 1, {SetSpec::integers()}).hybrid_rhs());
  CHECK(EquationSpec::phi(2, 4, {SetSpec::integers()}).alpha_string() == "1/2");
  CHECK_THROWS_AS(EquationSpec::phi(1, 1, {}), std::invalid_argument);
  CHECK_THROWS_AS(
      EquationSpec::phi(1, 1, {SetSpec::explicit_set({0, 1})}),
      std::invalid_argument);
}

TEST_CASE("lhs_value worked examples") {
  PrimeSieve sieve(100);
  auto v1 = lhs_value(EquationSpec::phi(1, 1, {SetSpec::integers()}), {3}, sieve);
  REQUIRE(std::holds_alternative<FactoredNat>(v1));
  CHECK(std::get<FactoredNat>(v1) ==
        FactoredNat::from_terms({{2, 1}, {3, 1}}));

  auto v2 = lhs_value(EquationSpec::phi(1, 2, {SetSpec::squares()}), {2}, sieve);
  REQUIRE(std::holds_alternative<FactoredNat>(v2));
  CHECK(expand(std::get<FactoredNat>(v2)) == 6);

  auto v3 = lhs_value(
      EquationSpec::phi(1, 1, {SetSpec::integers(), SetSpec::integers()}),
      {2, 3}, sieve);
  REQUIRE(std::holds_alternative<FactoredNat>(v3));
  CHECK(expand(std::get<FactoredNat>(v3)) == 12);

  // 1/3 * 2! is not an integer.
  auto v4 = lhs_value(EquationSpec::phi(1, 3, {SetSpec::integers()}), {2}, sieve);
  CHECK(std::holds_alternative<NotInteger>(v4));

  CHECK_THROWS_AS(
      lhs_value(EquationSpec::phi(1, 1, {SetSpec::integers()}), {1, 2}, sieve),
      std::invalid_argument);
}

TEST_CASE("solve_for_n worked examples") {
  PrimeSieve sieve(1000);
  auto r1 = solve_for_n(EquationSpec::phi(1, 1, {SetSpec::integers()}), 3, sieve);
  CHECK(r1.complete);
  REQUIRE(r1.tuples.size() == 1);
  CHECK(r1.tuples[0] == std::vector<Nat>{2});

  auto r2 = solve_for_n(
      EquationSpec::sigma(0, 1, 1, {SetSpec::integers(), SetSpec::integers()}),
      3, sieve);
  CHECK(r2.complete);
  REQUIRE(r2.tuples.size() == 1);
  CHECK(r2.tuples[0] == std::vector<Nat>{2, 2});

  auto r3 = solve_for_n(EquationSpec::sigma(1, 1, 1, {SetSpec::integers()}), 2, sieve);
  CHECK(r3.complete);
  CHECK(r3.tuples.empty());

  CHECK_THROWS_AS(solve_for_n(EquationSpec::phi(1, 1, {SetSpec::integers()}), 0, sieve),
                  std::invalid_argument);
}

TEST_CASE("golden solution tables reproduce") {
  PrimeSieve sieve(1000);
  for (const char* name :
       {"phi_1_Z_100.json", "sigma0_1_Z_100.json", "sigma0_1_ZZ_100.json",
        "phi_1_ap2_0_100.json", "sigma1_1_Z_60.json", "phi_half_squares_60.json"}) {
    CAPTURE(name);
    auto table = golden::load(name);
    auto report = search(table.spec, table.n_max, sieve);
    CHECK(golden::flatten(report) == table.solutions);
    CHECK(report.incomplete_n.empty());
    CHECK(report.all_verified);
  }
}

TEST_CASE("hybrid searches with k >= 1") {
  PrimeSieve sieve(1000);
  // sigma_2(1!) = 1 = 1!
  auto r1 = search(EquationSpec::sigma(2, 1, 1, {SetSpec::integers()}), 40, sieve);
  REQUIRE(r1.solutions.size() == 1);
  CHECK(r1.solutions[0].n == 1);
  CHECK(r1.solutions[0].m == std::vector<Nat>{1});
  CHECK(r1.all_verified);

  // sigma_1(3!) = 12 = 2 * 1! * 3!; no other n <= 40 balances.
  auto r2 = search(
      EquationSpec::sigma(1, 2, 1, {SetSpec::integers(), SetSpec::integers()}),
      40, sieve);
  REQUIRE(r2.solutions.size() == 1);
  CHECK(r2.solutions[0].n == 3);
  CHECK(r2.solutions[0].m == std::vector<Nat>{1, 3});
  CHECK(r2.all_verified);
}

TEST_CASE("search agrees with the naive oracle on a mixed grid") {
  PrimeSieve sieve(1000);
  struct Combo {
    EquationSpec spec;
    Nat a, b;
  };
  std::vector<Combo> combos;
  std::vector<std::pair<Nat, Nat>> alphas{{1, 1}, {1, 2}, {2, 1}};
  std::vector<std::vector<SetSpec>> set_lists{
      {SetSpec::integers()},
      {SetSpec::arith_prog(2, 0)},
      {SetSpec::squares()},
      {SetSpec::integers(), SetSpec::integers()},
      {SetSpec::integers(), SetSpec::squares()},
      {SetSpec::arith_prog(3, 1), SetSpec::integers()}};
  for (auto [a, b] : alphas) {
    for (const auto& sets : set_lists) {
      combos.push_back({EquationSpec::phi(a, b, sets), a, b});
      combos.push_back({EquationSpec::sigma(0, a, b, sets), a, b});
      combos.push_back({EquationSpec::sigma(1, a, b, sets), a, b});
    }
  }
  for (const auto& combo : combos) {
    CAPTURE(combo.spec.func_string());
    CAPTURE(combo.spec.alpha_string());
    CAPTURE(combo.spec.sets.size());
    auto report = search(combo.spec, 25, sieve);
    CHECK(report.incomplete_n.empty());
    CHECK(report.all_verified);
    std::map<Nat, std::vector<std::vector<Nat>>> got;
    for (const auto& rec : report.solutions) got[rec.n].push_back(rec.m);
    for (Nat n = 1; n <= 25; ++n) {
      auto want = oracle_tuples(combo.spec, n, combo.a, combo.b);
      auto it = got.find(n);
      std::vector<std::vector<Nat>> have =
          it == got.end() ? std::vector<std::vector<Nat>>{} : it->second;
      CAPTURE(n);
      REQUIRE(have == want);
    }
  }
}

TEST_CASE("solutions vanish beyond a threshold in every golden run") {
  // Finiteness showing up at desk scale: a last solution well before n_max.
  PrimeSieve sieve(1000);
  auto report = search(EquationSpec::phi(1, 1, {SetSpec::integers()}), 100, sieve);
  REQUIRE(!report.solutions.empty());
  CHECK(report.solutions.back().n == 3);
  CHECK(report.incomplete_n.empty());  // nothing was cut off: a real absence
}

TEST_CASE("m_cap marks results incomplete") {
  PrimeSieve sieve(100);
  SearchCaps caps;
  caps.m_cap = 1;
  auto report = search(EquationSpec::phi(1, 1, {SetSpec::integers()}), 5, sieve, caps);
  // Only m = 1 is reachable: phi(1!) = phi(2!) = 1.
  REQUIRE(report.solutions.size() == 2);
  CHECK(report.solutions[0].n == 1);
  CHECK(report.solutions[1].n == 2);
  CHECK(report.incomplete_n == std::vector<Nat>{1, 2, 3, 4, 5});
  CHECK(report.all_verified);
}

TEST_CASE("a too-small sieve is reported, not papered over") {
  // sigma(30!) needs m! beyond 30!, but the slot cannot grow past the sieve.
  PrimeSieve sieve(30);
  auto report = search(EquationSpec::sigma(1, 1, 1, {SetSpec::integers()}), 30, sieve);
  CHECK(report.incomplete_n == std::vector<Nat>{30});
  REQUIRE(report.solutions.size() == 1);
  CHECK(report.solutions[0].n == 1);

  CHECK_THROWS_AS(search(EquationSpec::phi(1, 1, {SetSpec::integers()}), 31, sieve),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      search(EquationSpec::phi(1, 1, {SetSpec::arith_prog(50, 0)}), 10, PrimeSieve(40)),
      std::invalid_argument);
}

TEST_CASE("verify_solution accepts solutions and rejects non-solutions") {
  PrimeSieve sieve(100);
  auto phi_z = EquationSpec::phi(1, 1, {SetSpec::integers()});
  CHECK(verify_solution(phi_z, 3, {2}, sieve));
  CHECK_FALSE(verify_solution(phi_z, 3, {1}, sieve));
  CHECK_FALSE(verify_solution(phi_z, 4, {2}, sieve));
  auto sig1 = EquationSpec::sigma(1, 2, 1, {SetSpec::integers(), SetSpec::integers()});
  CHECK(verify_solution(sig1, 3, {1, 3}, sieve));
  CHECK_FALSE(verify_solution(sig1, 3, {1, 2}, sieve));
  // 1/3 * 2! is not even an integer.
  CHECK_FALSE(verify_solution(EquationSpec::phi(1, 3, {SetSpec::integers()}), 3, {2}, sieve));
}

TEST_CASE("certificates are equal and well-formed") {
  PrimeSieve sieve(200);
  auto rep = search(EquationSpec::phi(1, 1, {SetSpec::integers()}), 100, sieve);
  for (const auto& rec : rep.solutions) {
    CHECK(rec.lhs_certificate == rec.rhs_certificate);
    CHECK(rec.lhs_certificate.front() == '{');
  }
  auto hyb = search(EquationSpec::sigma(1, 1, 1, {SetSpec::integers()}), 40, sieve);
  for (const auto& rec : hyb.solutions) {
    CHECK(rec.lhs_certificate == rec.rhs_certificate);
    CHECK(rec.lhs_certificate.rfind("fnv1a64:", 0) == 0);
    CHECK(rec.lhs_certificate.size() == 8 + 16);
  }
}

TEST_CASE("reports serialize deterministically across worker counts") {
  PrimeSieve sieve(500);
  auto spec = EquationSpec::sigma(0, 1, 1,
                                  {SetSpec::integers(), SetSpec::arith_prog(3, 1)});
  auto r1 = search(spec, 300, sieve, {}, 1);
  auto r4 = search(spec, 300, sieve, {}, 4);
  CHECK(report_to_json(r1) == report_to_json(r4));
  CHECK(report_to_csv(r1) == report_to_csv(r4));
}

TEST_CASE("json report structure") {
  PrimeSieve sieve(200);
  auto spec = EquationSpec::phi(1, 1, {SetSpec::integers()});
  auto rep = search(spec, 100, sieve);
  auto j = nlohmann::json::parse(report_to_json(rep));
  CHECK(j.at("schema") == "facteq.search.v1");
  CHECK(j.at("equation").at("f") == "phi");
  CHECK(j.at("equation").at("alpha") == "1");
  CHECK(j.at("equation").at("r") == 1);
  CHECK(j.at("equation").at("sets")[0] == "Z");
  CHECK(j.at("equation").at("m_convention") == "m_i >= 1, tuples ascending");
  CHECK(j.at("n_range")[0] == 1);
  CHECK(j.at("n_range")[1] == 100);
  REQUIRE(j.at("solutions").size() == 3);
  CHECK(j.at("solutions")[2].at("n") == 3);
  CHECK(j.at("solutions")[2].at("m")[0] == 2);
  CHECK(j.at("solutions")[2].at("lhs_certificate").is_object());
  CHECK(j.at("incomplete_n").empty());
  CHECK(j.at("all_verified") == true);
  CHECK(j.at("stats").contains("nodes"));
  CHECK(j.at("stats").contains("div_prunes"));
  CHECK(j.at("stats").contains("window_prunes"));
  CHECK(j.at("stats").contains("leaf_checks"));
  CHECK_FALSE(j.contains("wall_seconds"));
  // phi(1!) = 1: the certificate of the empty product is the empty object.
  CHECK(j.at("solutions")[0].at("lhs_certificate").is_object());
}

TEST_CASE("csv report is exactly the solution rows") {
  PrimeSieve sieve(200);
  auto rep = search(EquationSpec::phi(1, 1, {SetSpec::integers()}), 100, sieve);
  CHECK(report_to_csv(rep) == "n,m1\n1,1\n2,1\n3,2\n");
  auto rep2 = search(
      EquationSpec::sigma(0, 1, 1, {SetSpec::integers(), SetSpec::integers()}),
      100, sieve);
  CHECK(report_to_csv(rep2) == "n,m1,m2\n1,1,1\n2,1,2\n3,2,2\n");
}
