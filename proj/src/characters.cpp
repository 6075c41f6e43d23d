#include "qtwist/characters.hpp"

#include <cmath>
#include <numbers>

#include "qtwist/errors.hpp"

namespace qtwist {

int jacobi(std::int64_t m, std::int64_t k) {
  if (k <= 0 || k % 2 == 0) throw DomainError("jacobi: k must be odd and positive");
  std::int64_t a = m % k;
  if (a < 0) a += k;
  std::int64_t n = k;
  int t = 1;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const std::int64_t r = n % 8;
      if (r == 3 || r == 5) t = -t;
    }
    std::swap(a, n);
    if (a % 4 == 3 && n % 4 == 3) t = -t;
    a %= n;
  }
  return n == 1 ? t : 0;
}

namespace {

// (2/n) * (-1)^{((n-1)/2)((d-1)/2)} for odd n.
int kronecker_two_part(std::uint64_t n, std::uint64_t d) {
  const std::uint64_t r = n % 8;
  int s = (r == 1 || r == 7) ? 1 : -1;
  if (n % 4 == 3 && d % 4 == 3) s = -s;
  return s;
}

}  // namespace

int chi8d(std::uint64_t d, std::uint64_t n) {
  if (d == 0 || d % 2 == 0 || !is_squarefree(d))
    throw DomainError("chi8d: d must be odd, positive and square-free");
  if (n == 0) throw DomainError("chi8d: n must be positive");
  if (n % 2 == 0) return 0;
  return kronecker_two_part(n, d) *
         jacobi(static_cast<std::int64_t>(n % d), static_cast<std::int64_t>(d));
}

KroneckerTable::KroneckerTable(std::uint64_t d) : d_(d) {
  if (d == 0 || d % 2 == 0) throw DomainError("KroneckerTable: d must be odd and positive");
  const std::uint64_t q = 8 * d;
  values_.assign(q, 0);
  // (n/d) over one period of d, as a product of Legendre tables.
  std::vector<std::int8_t> jac(d, 1);
  for (const auto& pp : factorize(d)) {
    const std::uint64_t p = pp.p;
    std::vector<std::int8_t> leg(p, -1);
    leg[0] = 0;
    for (std::uint64_t x = 1; x <= p / 2; ++x) leg[x * x % p] = 1;
    if (pp.e % 2 == 0)
      for (auto& v : leg) v = static_cast<std::int8_t>(v * v);
    for (std::uint64_t r = 0; r < d; ++r) jac[r] = static_cast<std::int8_t>(jac[r] * leg[r % p]);
  }
  for (std::uint64_t n = 1; n < q; n += 2)
    values_[n] = static_cast<std::int8_t>(kronecker_two_part(n, d) * jac[n % d]);
}

SieveTables sieve_tables(std::uint64_t X) {
  SieveTables t;
  t.squarefree.assign(X + 1, 0);
  t.moebius.assign(X + 1, 0);
  t.totient.assign(X + 1, 0);
  if (X == 0) return t;
  std::vector<std::uint64_t> primes;
  std::vector<bool> composite(X + 1, false);
  t.moebius[1] = 1;
  t.totient[1] = 1;
  for (std::uint64_t i = 2; i <= X; ++i) {
    if (!composite[i]) {
      primes.push_back(i);
      t.moebius[i] = -1;
      t.totient[i] = i - 1;
    }
    for (auto p : primes) {
      if (p * i > X) break;
      composite[p * i] = true;
      if (i % p == 0) {
        t.moebius[p * i] = 0;
        t.totient[p * i] = t.totient[i] * p;
        break;
      }
      t.moebius[p * i] = static_cast<std::int8_t>(-t.moebius[i]);
      t.totient[p * i] = t.totient[i] * (p - 1);
    }
  }
  for (std::uint64_t i = 1; i <= X; ++i) t.squarefree[i] = t.moebius[i] != 0;
  return t;
}

std::complex<double> gauss_sum_bruteforce(std::int64_t m, std::uint64_t k,
                                          std::uint64_t bound) {
  if (k == 0 || k % 2 == 0) throw DomainError("gauss_sum_bruteforce: k must be odd");
  if (k > bound) throw RangeError("gauss_sum_bruteforce: k exceeds brute-force bound");
  const auto kk = static_cast<std::int64_t>(k);
  std::int64_t mr = m % kk;
  if (mr < 0) mr += kk;
  std::complex<double> sum = 0.0;
  for (std::int64_t a = 1; a < kk; ++a) {
    const int chi = jacobi(a, kk);
    if (chi == 0) continue;
    // am mod k keeps the phase argument in [0, 1).
    const auto r = static_cast<double>((a * mr) % kk) / static_cast<double>(kk);
    sum += static_cast<double>(chi) * std::polar(1.0, 2.0 * std::numbers::pi * r);
  }
  if (k == 1) sum = 1.0;
  const int minus_one = jacobi(-1, kk);
  const std::complex<double> pre =
      std::complex<double>(0.5, -0.5) + static_cast<double>(minus_one) * std::complex<double>(0.5, 0.5);
  return pre * sum;
}

namespace {

std::int64_t ipow(std::uint64_t p, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<std::int64_t>(p);
  return r;
}

void set_numeric(GaussSumValue& g) {
  g.numeric = {static_cast<double>(g.coef) * std::sqrt(static_cast<double>(g.radicand)), 0.0};
}

}  // namespace

GaussSumValue gauss_local(std::uint64_t p, int b, int a, int unit_symbol) {
  GaussSumValue g;
  if (b == 0) {
    g.coef = 1;
  } else if (a < 0 || b <= a) {
    g.coef = (b % 2 == 1) ? 0 : ipow(p, b - 1) * static_cast<std::int64_t>(p - 1);
  } else if (b == a + 1) {
    if (b % 2 == 0) {
      g.coef = -ipow(p, a);
    } else {
      g.coef = unit_symbol * ipow(p, a);
      g.radicand = p;
    }
  }
  if (g.coef == 0) g.radicand = 1;
  set_numeric(g);
  return g;
}

double gauss_local_normalized(std::uint64_t p, int b, int a, int unit_symbol) {
  const double pd = static_cast<double>(p);
  if (b == 0) return 1.0;
  if (a < 0 || b <= a) return (b % 2 == 1) ? 0.0 : 1.0 - 1.0 / pd;
  if (b == a + 1) return (b % 2 == 0) ? -1.0 / pd : unit_symbol / std::sqrt(pd);
  return 0.0;
}

GaussSumValue gauss_sum_closed(std::int64_t m, std::uint64_t k) {
  if (k == 0 || k % 2 == 0) throw DomainError("gauss_sum_closed: k must be odd");
  GaussSumValue g;
  g.coef = 1;
  for (const auto& pp : factorize(k)) {
    int a = -1;
    int unit = 0;
    if (m != 0) {
      a = 0;
      std::int64_t mm = m;
      const auto p = static_cast<std::int64_t>(pp.p);
      while (mm % p == 0) {
        mm /= p;
        ++a;
      }
      unit = jacobi(mm, p);
    }
    const GaussSumValue loc = gauss_local(pp.p, pp.e, a, unit);
    g.coef *= loc.coef;
    g.radicand *= loc.radicand;
    if (g.coef == 0) {
      g.radicand = 1;
      break;
    }
  }
  set_numeric(g);
  return g;
}

int TwistIndex::exponent(std::uint64_t p) const {
  for (const auto& pp : prime_factors)
    if (pp.p == p) return pp.e;
  return 0;
}

TwistIndex twist_index(std::int64_t l) {
  if (l <= 0 || l % 2 == 0) throw DomainError("twist index l must be odd and positive");
  TwistIndex ti;
  ti.l = static_cast<std::uint64_t>(l);
  ti.prime_factors = factorize(ti.l);
  for (const auto& pp : ti.prime_factors) {
    if (pp.e % 2 == 1) ti.l1 *= pp.p;
    for (int j = 0; j < pp.e / 2; ++j) ti.l2 *= pp.p;
  }
  return ti;
}

std::vector<std::uint64_t> condition_check(const TwistIndex& ti, const HeckeForm& form,
                                           double tol) {
  std::vector<std::uint64_t> bad;
  for (const auto& pp : ti.prime_factors) {
    if (pp.e % 2 == 0) continue;
    const double v = 1.0 + form.lambda(pp.p) + 1.0 / static_cast<double>(pp.p);
    if (std::abs(v) <= tol) bad.push_back(pp.p);
  }
  return bad;
}

std::vector<std::uint64_t> condition_scan(std::uint64_t pmax, const HeckeForm& form,
                                          double tol) {
  std::vector<std::uint64_t> bad;
  for (auto p : primes_up_to(pmax)) {
    if (p == 2) continue;
    const double v = 1.0 + form.lambda(p) + 1.0 / static_cast<double>(p);
    if (std::abs(v) <= tol) bad.push_back(p);
  }
  return bad;
}

}  // namespace qtwist
