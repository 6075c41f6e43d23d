#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qtwist/arith.hpp"
#include "qtwist/hecke.hpp"

namespace qtwist {

/// Jacobi symbol (m/k) for odd k >= 1, by binary quadratic reciprocity.
int jacobi(std::int64_t m, std::int64_t k);

/// Kronecker symbol (8d/n) for odd, positive, square-free d.
int chi8d(std::uint64_t d, std::uint64_t n);

/// The character n -> (8d/n) tabulated over one period 8d.
///
/// d must be odd and positive; it need not be square-free (the table then
/// realises the imprimitive character, zero on n sharing a factor with d).
class KroneckerTable {
 public:
  explicit KroneckerTable(std::uint64_t d);

  std::uint64_t d() const { return d_; }
  std::uint64_t modulus() const { return values_.size(); }
  int operator()(std::uint64_t n) const {
    return values_[static_cast<std::size_t>(n % values_.size())];
  }
  const std::vector<std::int8_t>& values() const { return values_; }

 private:
  std::uint64_t d_;
  std::vector<std::int8_t> values_;
};

struct SieveTables {
  std::vector<std::uint8_t> squarefree;  // 1 iff n square-free (index 0 unused)
  std::vector<std::int8_t> moebius;
  std::vector<std::uint64_t> totient;
};

/// Linear sieve for mu, phi and the square-free indicator on [1, X].
SieveTables sieve_tables(std::uint64_t X);

/// Exact value coef * sqrt(radicand) with radicand square-free.
struct GaussSumValue {
  std::int64_t coef = 0;
  std::uint64_t radicand = 1;
  std::complex<double> numeric{0.0, 0.0};

  bool is_zero() const { return coef == 0; }
  bool operator==(const GaussSumValue& o) const {
    return coef == o.coef && (coef == 0 || radicand == o.radicand);
  }
};

inline constexpr std::uint64_t kGaussBruteForceBound = 10'000;

/// The normalised character sum
///   ((1-i)/2 + (-1/k)(1+i)/2) * sum_{a mod k} (a/k) e(am/k),
/// evaluated literally.
std::complex<double> gauss_sum_bruteforce(std::int64_t m, std::uint64_t k,
                                          std::uint64_t bound = kGaussBruteForceBound);

/// Local value G_m(p^b) where p^a exactly divides m (a < 0 encodes m = 0)
/// and unit_symbol = (m/p^a over p) is needed only for the b = a+1 odd case.
GaussSumValue gauss_local(std::uint64_t p, int b, int a, int unit_symbol);

/// G_m(p^b) / p^b from the same table, in floating point (no overflow for
/// large b).
double gauss_local_normalized(std::uint64_t p, int b, int a, int unit_symbol);

/// Closed-form evaluation by multiplicativity over the prime powers of k.
GaussSumValue gauss_sum_closed(std::int64_t m, std::uint64_t k);

struct TwistIndex {
  std::uint64_t l = 1;
  std::uint64_t l1 = 1;
  std::uint64_t l2 = 1;
  Factorization prime_factors;  // (p, l_p) with p^{l_p} || l

  /// Exponent of p in l (0 if p does not divide l).
  int exponent(std::uint64_t p) const;
  bool divides_l1(std::uint64_t p) const { return exponent(p) % 2 == 1; }
};

TwistIndex twist_index(std::int64_t l);

/// Primes p | l1 with |1 + lambda(p) + 1/p| <= tol.
std::vector<std::uint64_t> condition_check(const TwistIndex& ti, const HeckeForm& form,
                                           double tol = 1e-9);

/// Same test over all primes up to pmax (used for scanning a form).
std::vector<std::uint64_t> condition_scan(std::uint64_t pmax, const HeckeForm& form,
                                          double tol);

}  // namespace qtwist
