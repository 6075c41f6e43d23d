#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qtwist/arith.hpp"
#include "qtwist/characters.hpp"
#include "qtwist/errors.hpp"

using namespace qtwist;

namespace {

std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

// Jacobi symbol from Euler's criterion at each prime factor.
int jacobi_oracle(std::int64_t m, std::uint64_t k) {
  int r = 1;
  for (const auto& pp : factorize(k)) {
    const auto p = static_cast<std::int64_t>(pp.p);
    const std::uint64_t a = static_cast<std::uint64_t>(((m % p) + p) % p);
    if (a == 0) return 0;
    const std::uint64_t e = powmod(a, (pp.p - 1) / 2, pp.p);
    const int leg = e == 1 ? 1 : -1;
    if (pp.e % 2 == 1) r *= leg;
  }
  return r;
}

// Literal character sum, Jacobi symbol via the oracle above.
std::complex<double> gauss_oracle(std::int64_t m, std::uint64_t k) {
  std::complex<double> s = 0.0;
  for (std::uint64_t a = 1; a <= k; ++a) {
    const int c = jacobi_oracle(static_cast<std::int64_t>(a), k);
    if (c == 0) continue;
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(a) * static_cast<double>(m) /
                       static_cast<double>(k);
    s += static_cast<double>(c) * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  if (k == 1) s = 1.0;
  const int minus = jacobi_oracle(-1, k);
  return (std::complex<double>(0.5, -0.5) + static_cast<double>(minus) * std::complex<double>(0.5, 0.5)) * s;
}

}  // namespace

TEST_CASE("jacobi agrees with Euler's criterion") {
  for (std::int64_t k = 1; k <= 301; k += 2)
    for (std::int64_t m = -60; m <= 60; ++m)
      CHECK(jacobi(m, k) == jacobi_oracle(m, static_cast<std::uint64_t>(k)));
  CHECK_THROWS_AS(jacobi(3, 4), DomainError);
}

TEST_CASE("chi_8d: values, periodicity and multiplicativity") {
  for (std::uint64_t d : {1ULL, 3ULL, 5ULL, 15ULL, 101ULL, 105ULL}) {
    const KroneckerTable t(d);
    CHECK(t.modulus() == 8 * d);
    for (std::uint64_t n = 1; n <= 3 * 8 * d; ++n) {
      CHECK(t(n) == chi8d(d, n));
      CHECK(chi8d(d, n) == chi8d(d, n + 8 * d));
    }
    for (std::uint64_t m = 1; m < 60; ++m)
      for (std::uint64_t n = 1; n < 60; ++n) CHECK(chi8d(d, m * n) == chi8d(d, m) * chi8d(d, n));
  }
  // (8/n) = (2/n): +1 for n = +-1 mod 8, -1 for n = +-3 mod 8.
  CHECK(chi8d(1, 7) == 1);
  CHECK(chi8d(1, 3) == -1);
  CHECK(chi8d(1, 2) == 0);
  // chi_8d is even: chi(8d - 1) = chi(-1) = 1.
  for (std::uint64_t d : {3ULL, 7ULL, 11ULL, 35ULL}) CHECK(chi8d(d, 8 * d - 1) == 1);
  CHECK_THROWS_AS(chi8d(9, 5), DomainError);
  CHECK_THROWS_AS(chi8d(4, 5), DomainError);
}

TEST_CASE("Kronecker table for non-square-free d vanishes off the coprime residues") {
  const KroneckerTable t(45);
  for (std::uint64_t n = 1; n < 360; n += 2) {
    const int want = gcd_u64(n, 15) == 1 ? chi8d(5, n) : 0;
    CHECK(t(n) == want);
  }
}

TEST_CASE("sieve tables against direct definitions") {
  const auto s = sieve_tables(2000);
  for (std::uint64_t n = 1; n <= 2000; ++n) {
    int mu = 1;
    std::uint64_t phi = n;
    for (const auto& pp : factorize(n)) {
      mu = pp.e > 1 ? 0 : -mu;
      phi = phi / pp.p * (pp.p - 1);
    }
    CHECK(s.moebius[n] == mu);
    CHECK(s.totient[n] == phi);
    CHECK(static_cast<bool>(s.squarefree[n]) == is_squarefree(n));
  }
}

TEST_CASE("Gauss sums: closed form against the independent literal sum") {
  double worst = 0.0;
  for (std::uint64_t k = 1; k <= 135; k += 2)
    for (std::int64_t m = -30; m <= 30; ++m) {
      const auto c = gauss_sum_closed(m, k);
      const auto o = gauss_oracle(m, k);
      worst = std::max(worst, std::abs(c.numeric - o));
      CHECK(std::abs(gauss_sum_bruteforce(m, k) - o) < 1e-9);
    }
  CHECK(worst < 1e-9);
}

TEST_CASE("Gauss sums are real and multiplicative in k") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const std::uint64_t k1 = 2 * (rng() % 40) + 1, k2 = 2 * (rng() % 40) + 1;
    if (gcd_u64(k1, k2) != 1) continue;
    const std::int64_t m = static_cast<std::int64_t>(rng() % 101) - 50;
    const auto whole = gauss_sum_bruteforce(m, k1 * k2);
    CHECK(std::abs(whole.imag()) < 1e-9);
    CHECK(std::abs(whole - gauss_sum_bruteforce(m, k1) * gauss_sum_bruteforce(m, k2)) < 1e-9);
    const auto c = gauss_sum_closed(m, k1 * k2);
    const auto c1 = gauss_sum_closed(m, k1), c2 = gauss_sum_closed(m, k2);
    CHECK(c.coef == c1.coef * c2.coef);
  }
}

TEST_CASE("local Gauss table cases") {
  // p = 3: b <= a odd -> 0; b <= a even -> phi(p^b); b = a+1 even -> -p^a;
  // b = a+1 odd -> (m'/p) p^a sqrt p; b >= a+2 -> 0.
  CHECK(gauss_local(3, 1, 1, 0).coef == 0);
  CHECK(gauss_local(3, 2, 2, 0).coef == 6);
  CHECK(gauss_local(3, 2, 1, 0).coef == -3);
  const auto g = gauss_local(3, 1, 0, -1);
  CHECK(g.coef == -1);
  CHECK(g.radicand == 3);
  CHECK(gauss_local(3, 3, 0, 1).coef == 0);
  CHECK(gauss_local(5, 4, -1, 0).coef == 500);  // m = 0
  CHECK(gauss_local_normalized(5, 4, -1, 0) == doctest::Approx(0.8));
  CHECK(gauss_local_normalized(5, 3, 2, 1) == doctest::Approx(1.0 / std::sqrt(5.0)));
  CHECK_THROWS_AS(gauss_sum_bruteforce(1, 10001), RangeError);
}

TEST_CASE("twist index decomposition") {
  const auto t = twist_index(3 * 3 * 3 * 5 * 7 * 7);
  CHECK(t.l1 == 15);
  CHECK(t.l2 == 21);
  CHECK(t.exponent(3) == 3);
  CHECK(t.exponent(11) == 0);
  CHECK(t.divides_l1(5));
  CHECK(!t.divides_l1(7));
  CHECK(t.l1 * t.l2 * t.l2 == t.l);
  CHECK_THROWS_AS(twist_index(4), DomainError);
  CHECK_THROWS_AS(twist_index(0), DomainError);
}

TEST_CASE("non-vanishing condition on 1 + lambda(p) + 1/p") {
  const HeckeForm f = HeckeForm::delta(2000);
  CHECK(condition_check(twist_index(15), f).empty());
  // A form with lambda(3) = -1 - 1/3 violates it at p = 3.
  std::vector<int128> tau(10, 0);
  tau[0] = 1;
  // lambda(3) = tau(3)/3^{5.5}; pick tau(3) so that lambda(3) is near -4/3.
  tau[2] = static_cast<int128>(std::llround(-4.0 / 3.0 * std::pow(3.0, 5.5)));
  const HeckeForm g(12, tau);
  CHECK(condition_check(twist_index(3), g, 1e-3).size() == 1);
  CHECK(condition_check(twist_index(9), g, 1e-3).empty());  // only p | l1 matters
  CHECK(condition_scan(2000, f, 1e-6).empty());
}
