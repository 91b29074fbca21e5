#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <stdexcept>

#include "doctest.h"
#include "facteq/valuations.hpp"
#include "oracles.hpp"

using namespace facteq;

TEST_CASE("digit_sum basics") {
  CHECK(digit_sum(0, 2) == 0);
  CHECK(digit_sum(10, 2) == 2);    // 1010
  CHECK(digit_sum(255, 2) == 8);
  CHECK(digit_sum(12345, 10) == 15);
  CHECK(digit_sum(26, 3) == 6);    // 222
  CHECK_THROWS_AS(digit_sum(5, 1), std::invalid_argument);
}

TEST_CASE("legendre spot values") {
  CHECK(legendre(10, 2) == 8);
  CHECK(legendre(10, 3) == 4);
  CHECK(legendre(100, 5) == 24);
  CHECK(legendre(1000, 2) == 994);
  CHECK(legendre(5, 7) == 0);
  CHECK(legendre(0, 2) == 0);
  CHECK_THROWS_AS(legendre(10, 1), std::invalid_argument);
}

TEST_CASE("two Legendre routes agree for every base") {
  // The digit identity holds for any base >= 2, prime or not.
  for (Nat n = 0; n <= 2000; ++n)
    for (Nat p = 2; p <= 100; ++p) REQUIRE(legendre(n, p) == legendre_digit(n, p));
}

TEST_CASE("legendre against a direct factorial factorization") {
  auto fact = oracle::factorial_factorization(400);
  for (const auto& [p, e] : fact) CHECK(legendre(400, p) == e);
}

TEST_CASE("factorial_factored expands to n!") {
  PrimeSieve sieve(500);
  for (Nat n : {Nat(0), Nat(1), Nat(2), Nat(5), Nat(10), Nat(50), Nat(100), Nat(500)}) {
    auto f = factorial_factored(n, sieve);
    CHECK(expand(f) == oracle::factorial(n));
  }
}

TEST_CASE("factorial_factored exponents are Legendre exponents") {
  PrimeSieve sieve(300);
  auto f = factorial_factored(300, sieve);
  for (const auto& [p, e] : f.terms()) {
    CHECK(sieve.is_prime(p));
    CHECK(static_cast<Nat>(e) == legendre(300, p));
  }
  // Every prime <= n appears.
  CHECK(f.terms().size() == sieve.prime_count(300));
  CHECK_THROWS_AS(factorial_factored(301, sieve), std::invalid_argument);
}
