#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/hecke.hpp"

using namespace qtwist;

namespace {

// q prod_{n >= 1} (1 - q^n)^24 by repeated multiplication, exact.
std::vector<int128> eta_product_oracle(std::size_t N) {
  std::vector<int128> c(N, 0);  // coefficient of q^j, j < N
  c[0] = 1;
  for (std::size_t n = 1; n < N; ++n)
    for (int rep = 0; rep < 24; ++rep)
      for (std::size_t j = N - 1; j >= n; --j) {
        c[j] -= c[j - n];
        if (j == n) break;
      }
  std::vector<int128> tau(N + 1, 0);
  for (std::size_t j = 0; j < N; ++j) tau[j + 1] = c[j];
  return tau;
}

}  // namespace

TEST_CASE("tau matches the eta product") {
  const std::size_t N = 400;
  const auto oracle = eta_product_oracle(N);
  const auto tau = tau_table(N);
  REQUIRE(tau.size() == N);
  for (std::size_t n = 1; n <= N; ++n) CHECK(tau[n - 1] == oracle[n]);
  CHECK(tau[0] == 1);
  CHECK(tau[1] == -24);
  CHECK(tau[2] == 252);
  CHECK(tau[3] == -1472);
  CHECK(tau[4] == 4830);
}

TEST_CASE("known large tau values") {
  const HeckeForm f = HeckeForm::delta(1000);
  CHECK(to_string(f.tau(10)) == "-115920");
  CHECK(to_string(f.tau(100)) == "37534859200");
  // Exact integer Hecke relations.
  CHECK(f.tau(1000) == f.tau(8) * f.tau(125));
  int128 p11 = 1;
  for (int i = 0; i < 11; ++i) p11 *= 31;
  CHECK(f.tau(961) == f.tau(31) * f.tau(31) - p11);
}

TEST_CASE("Hecke relations and multiplicativity") {
  const HeckeForm f = HeckeForm::delta(20000);
  for (std::uint64_t m = 2; m <= 140; ++m)
    for (std::uint64_t n = 2; m * n <= 20000; ++n)
      if (gcd_u64(m, n) == 1) CHECK(f.lambda(m * n) == doctest::Approx(f.lambda(m) * f.lambda(n)).epsilon(1e-12));
  for (auto p : primes_up_to(140)) {
    const double l = f.lambda(p);
    CHECK(std::abs(f.lambda(p * p) - (l * l - 1.0)) < 1e-12);
    if (p * p * p <= 20000) CHECK(std::abs(f.lambda(p * p * p) - (l * f.lambda(p * p) - l)) < 1e-12);
  }
}

TEST_CASE("Deligne bound holds and the check detects violations") {
  const HeckeForm f = HeckeForm::delta(20000);
  CHECK(deligne_check(20000, f).empty());
  std::vector<int128> tau(10, 0);
  tau[0] = 1;
  tau[1] = 1000000;  // |lambda(2)| far above d(2) = 2
  const HeckeForm bad(12, tau);
  const auto v = deligne_check(10, bad);
  REQUIRE(!v.empty());
  CHECK(v.front() == 2);
}

TEST_CASE("lambda beyond the cache is assembled multiplicatively") {
  const HeckeForm small = HeckeForm::delta(200);
  const HeckeForm big = HeckeForm::delta(40000);
  for (std::uint64_t n : {221ULL, 391ULL, 10201ULL, 3 * 199ULL * 13ULL})
    CHECK(small.lambda(n) == doctest::Approx(big.lambda(n)).epsilon(1e-12));
  CHECK_THROWS_AS(small.lambda(211 * 2), RangeError);  // 211 is a prime above the cache
}

TEST_CASE("sigma_f and local roots") {
  const HeckeForm f = HeckeForm::delta(5000);
  const auto sig = sigma_f_table(5000, f);
  for (std::uint64_t n = 1; n <= 5000; ++n) {
    double direct = 0.0;
    for (std::uint64_t d = 1; d <= n; ++d)
      if (n % d == 0) direct += f.lambda(d);
    CHECK(sig[n] == doctest::Approx(direct).epsilon(1e-11));
    if (n <= 500) CHECK(f.sigma(n) == doctest::Approx(direct).epsilon(1e-11));
  }
  for (std::uint64_t p : {3, 5, 7, 11}) {
    const auto [a, b] = f.local_roots(p);
    CHECK(std::abs(a + b - f.lambda(p)) < 1e-12);
    CHECK(std::abs(a * b - 1.0) < 1e-12);
  }
}

TEST_CASE("coefficient CSV round trip") {
  const HeckeForm f = HeckeForm::delta(300);
  const auto path = std::filesystem::temp_directory_path() / "qtwist_tau_roundtrip.csv";
  write_coefficient_csv(path, f);
  const HeckeForm g = read_coefficient_csv(path);
  REQUIRE(g.size() == f.size());
  for (std::uint64_t n = 1; n <= 300; ++n) {
    CHECK(g.tau(n) == f.tau(n));
    CHECK(g.lambda(n) == f.lambda(n));
  }
  std::filesystem::remove(path);
}

TEST_CASE("prime sums approach their constants") {
  const HeckeForm f = HeckeForm::delta(200000);
  const auto r = prime_sum_report(200000, f);
  // Mertens: sum 1/p - log log x -> 0.2615; Chebyshev: sum log p/p - log x -> -1.3325.
  CHECK(std::abs(r.mertens - 0.2615) < 0.01);
  CHECK(std::abs(r.chebyshev + 1.3325) < 0.05);
  CHECK(std::isfinite(r.rankin_selberg));
}
