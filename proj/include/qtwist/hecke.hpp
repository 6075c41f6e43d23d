#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "qtwist/arith.hpp"

namespace qtwist {

/// Raw Fourier coefficients of Delta = q prod (1 - q^n)^24; entry n-1 holds
/// tau(n) for 1 <= n <= N.
///
/// Computed exactly as (sum_k (-1)^k (2k+1) q^{k(k+1)/2})^8 by number
/// theoretic transforms modulo five primes and Garner reconstruction.
/// Throws OverflowError if a coefficient leaves the int128 range.
std::vector<int128> tau_table(std::size_t N);

/// Holomorphic Hecke eigenform of level one with a coefficient cache.
///
/// The cache holds tau(n) exactly and lambda(n) = tau(n) / n^{(k-1)/2} in
/// double precision for 1 <= n <= size().  Values beyond the cache are
/// assembled multiplicatively from cached prime eigenvalues.
class HeckeForm {
 public:
  /// `tau[n-1]` is the n-th coefficient; tau[0] must be 1.
  HeckeForm(int weight, std::vector<int128> tau);

  /// Ramanujan's Delta (weight 12) with coefficients up to N.
  static HeckeForm delta(std::size_t N);

  int weight() const { return weight_; }
  std::size_t size() const { return lambda_.size() - 1; }

  int128 tau(std::uint64_t n) const;

  /// Normalised eigenvalue; throws RangeError when n is not cached and a
  /// prime factor of n exceeds the cache.
  double lambda(std::uint64_t n) const;
  double lambda_prime_power(std::uint64_t p, int e) const;

  /// sigma_f(p^e) = sum_{j <= e} lambda(p^j).
  double sigma_prime_power(std::uint64_t p, int e) const;
  /// sigma_f(n) = sum_{m | n} lambda(m), by multiplicativity.
  double sigma(std::uint64_t n) const;

  /// Satake parameters alpha, beta with alpha + beta = lambda(p), alpha beta = 1.
  std::pair<std::complex<double>, std::complex<double>> local_roots(
      std::uint64_t p) const;

  /// lambda(1..size()) with index 0 unused.
  std::span<const double> lambda_table() const { return lambda_; }

 private:
  int weight_;
  std::vector<int128> tau_;
  std::vector<double> lambda_;
};

/// sigma_f(1..N) (index 0 unused) by a divisor sieve.
std::vector<double> sigma_f_table(std::size_t N, const HeckeForm& form);

/// All n <= N with |lambda(n)| > d(n) + tol.
std::vector<std::uint64_t> deligne_check(std::size_t N, const HeckeForm& form,
                                         double tol = 1e-9);

struct PrimeSumReport {
  double x;
  double mertens;          // sum 1/p - log log x
  double rankin_selberg;   // sum lambda(p)^2/p - log log x
  double chebyshev;        // sum log p / p - log x
};

PrimeSumReport prime_sum_report(double x, const HeckeForm& form);

/// Persist the cache as CSV `n,tau,lambda`.
void write_coefficient_csv(const std::filesystem::path& path,
                           const HeckeForm& form);
HeckeForm read_coefficient_csv(const std::filesystem::path& path,
                               int weight = 12);

}  // namespace qtwist
