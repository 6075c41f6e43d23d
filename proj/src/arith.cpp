#include "qtwist/arith.hpp"

#include <algorithm>
#include <cmath>

#include "qtwist/errors.hpp"

namespace qtwist {

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  if (n < 2) return out;
  std::vector<bool> composite(n + 1, false);
  for (std::uint64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

Factorization factorize(std::uint64_t n, std::uint64_t bound) {
  if (n == 0) throw DomainError("factorize: n must be positive");
  Factorization f;
  auto take = [&](std::uint64_t p) {
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e > 0) f.push_back({p, e});
  };
  take(2);
  take(3);
  std::uint64_t p = 5;
  for (; p <= bound && p * p <= n; p += 6) {
    take(p);
    take(p + 2);
  }
  if (n > 1) {
    if (p * p <= n) {
      throw RangeError("factorize: cofactor " + std::to_string(n) +
                       " exceeds the trial-division bound");
    }
    f.push_back({n, 1});
  }
  return f;
}

bool is_squarefree(std::uint64_t n) {
  return std::ranges::all_of(factorize(n),
                             [](const PrimePower& pp) { return pp.e == 1; });
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::uint64_t divisor_count(const Factorization& f) {
  std::uint64_t d = 1;
  for (const auto& pp : f) d *= static_cast<std::uint64_t>(pp.e + 1);
  return d;
}

std::string to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v)
                            : static_cast<unsigned __int128>(v);
  std::string s;
  while (u > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) s.push_back('-');
  std::reverse(s.begin(), s.end());
  return s;
}

int128 parse_int128(const std::string& s) {
  if (s.empty()) throw DomainError("parse_int128: empty string");
  std::size_t i = 0;
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) throw DomainError("parse_int128: no digits in '" + s + "'");
  constexpr unsigned __int128 kMax =
      (static_cast<unsigned __int128>(1) << 127) - 1;
  unsigned __int128 u = 0;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9')
      throw DomainError("parse_int128: bad digit in '" + s + "'");
    unsigned digit = static_cast<unsigned>(s[i] - '0');
    if (u > (kMax + (neg ? 1 : 0) - digit) / 10)
      throw OverflowError("parse_int128: '" + s + "' out of range");
    u = u * 10 + digit;
  }
  return neg ? static_cast<int128>(-u) : static_cast<int128>(u);
}

}  // namespace qtwist
