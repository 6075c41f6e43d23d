#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace qtwist {

using int128 = __int128;

/// Prime power p^e appearing in a factorisation.
struct PrimePower {
  std::uint64_t p;
  int e;
  bool operator==(const PrimePower&) const = default;
};

using Factorization = std::vector<PrimePower>;

/// Largest trial-division bound used anywhere in the library.
inline constexpr std::uint64_t kTrialDivisionBound = 10'000'000;

/// Sieve of Eratosthenes: all primes <= n in ascending order.
std::vector<std::uint64_t> primes_up_to(std::uint64_t n);

/// Trial-division factorisation; throws RangeError if a cofactor above
/// bound^2 survives without a factor <= bound.
Factorization factorize(std::uint64_t n,
                        std::uint64_t bound = kTrialDivisionBound);

bool is_squarefree(std::uint64_t n);

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);

/// Number of divisors from a factorisation.
std::uint64_t divisor_count(const Factorization& f);

std::string to_string(int128 v);
int128 parse_int128(const std::string& s);

}  // namespace qtwist
