#include <doctest.h>

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>

#include "qtwist/arith.hpp"
#include "qtwist/errors.hpp"

using namespace qtwist;

namespace {

bool naive_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("primes_up_to agrees with trial division") {
  const auto ps = primes_up_to(2000);
  std::size_t j = 0;
  for (std::uint64_t n = 0; n <= 2000; ++n) {
    if (naive_prime(n)) {
      REQUIRE(j < ps.size());
      CHECK(ps[j++] == n);
    }
  }
  CHECK(j == ps.size());
  CHECK(primes_up_to(1).empty());
}

TEST_CASE("factorize reconstructs n and uses primes") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t n = rng() % 1'000'000'000'000ULL + 1;
    std::uint64_t back = 1;
    for (const auto& pp : factorize(n)) {
      CHECK(naive_prime(pp.p));
      for (int e = 0; e < pp.e; ++e) back *= pp.p;
    }
    CHECK(back == n);
  }
  CHECK(factorize(1).empty());
}

TEST_CASE("factorize reports an insufficient bound") {
  // 1000003 * 1000033, both prime, with the bound below either factor.
  CHECK_THROWS_AS(factorize(1000003ULL * 1000033ULL, 1000), RangeError);
}

TEST_CASE("squarefree, gcd and divisor count") {
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    bool sf = true;
    std::uint64_t divisors = 0;
    for (std::uint64_t d = 1; d <= n; ++d) {
      if (n % d == 0) ++divisors;
      if (d > 1 && n % (d * d) == 0) sf = false;
    }
    CHECK(is_squarefree(n) == sf);
    CHECK(divisor_count(factorize(n)) == divisors);
    CHECK(gcd_u64(n, 360) == std::gcd(n, std::uint64_t{360}));
  }
}

TEST_CASE("int128 text round trip") {
  const int128 big = static_cast<int128>(std::numeric_limits<std::int64_t>::max()) * 1000003 + 17;
  CHECK(parse_int128(to_string(big)) == big);
  CHECK(parse_int128(to_string(-big)) == -big);
  CHECK(to_string(int128{0}) == "0");
  CHECK(to_string(int128{-24}) == "-24");
  CHECK_THROWS(parse_int128("12x"));
  CHECK_THROWS(parse_int128(""));
  CHECK_THROWS(parse_int128("999999999999999999999999999999999999999999"));
}
