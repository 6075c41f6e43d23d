#include "qtwist/hecke.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "qtwist/errors.hpp"
#include "qtwist/output.hpp"

namespace qtwist {

namespace {

std::uint64_t pow_mod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1;
  b %= m;
  while (e > 0) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

std::uint64_t primitive_root(std::uint64_t p) {
  Factorization f = factorize(p - 1);
  for (std::uint64_t g = 2;; ++g) {
    bool ok = true;
    for (const auto& pp : f) {
      if (pow_mod(g, (p - 1) / pp.p, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
}

// Iterative radix-2 transform over Z/P; the modulus is a template argument so
// the compiler can strength-reduce every reduction.
template <std::uint32_t P>
class Ntt {
 public:
  Ntt() : g_(primitive_root(P)) {}

  void transform(std::vector<std::uint32_t>& a, bool inverse) const {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<std::uint32_t> roots;
    for (std::size_t len = 2; len <= n; len <<= 1) {
      std::uint64_t w = pow_mod(g_, (P - 1) / len, P);
      if (inverse) w = pow_mod(w, P - 2, P);
      const std::size_t half = len / 2;
      roots.resize(half);
      roots[0] = 1;
      for (std::size_t k = 1; k < half; ++k)
        roots[k] = static_cast<std::uint32_t>(std::uint64_t{roots[k - 1]} * w % P);
      for (std::size_t i = 0; i < n; i += len) {
        for (std::size_t k = 0; k < half; ++k) {
          std::uint32_t u = a[i + k];
          std::uint32_t v =
              static_cast<std::uint32_t>(std::uint64_t{a[i + k + half]} * roots[k] % P);
          std::uint32_t s = u + v;
          a[i + k] = s >= P ? s - P : s;
          a[i + k + half] = u >= v ? u - v : u + P - v;
        }
      }
    }
    if (inverse) {
      std::uint64_t ninv = pow_mod(n, P - 2, P);
      for (auto& x : a) x = static_cast<std::uint32_t>(x * ninv % P);
    }
  }

  // a^2 truncated to `keep` coefficients.
  std::vector<std::uint32_t> square(std::vector<std::uint32_t> a,
                                    std::size_t keep) const {
    std::size_t n = 1;
    while (n < 2 * a.size()) n <<= 1;
    a.resize(n, 0);
    transform(a, false);
    for (auto& x : a) x = static_cast<std::uint32_t>(std::uint64_t{x} * x % P);
    transform(a, true);
    a.resize(keep);
    return a;
  }

 private:
  std::uint64_t g_;
};

constexpr std::array<std::uint32_t, 5> kPrimes = {167772161u, 469762049u,
                                                  754974721u, 1811939329u,
                                                  2013265921u};

// Coefficients of E^2 for E = prod (1 - q^n)^3, exact, first `len` terms.
std::vector<std::int64_t> jacobi_cube_squared(std::size_t len) {
  std::vector<std::pair<std::size_t, std::int64_t>> sparse;
  for (std::int64_t k = 0;; ++k) {
    std::size_t e = static_cast<std::size_t>(k * (k + 1) / 2);
    if (e >= len) break;
    sparse.emplace_back(e, (k % 2 == 0 ? 1 : -1) * (2 * k + 1));
  }
  std::vector<std::int64_t> sq(len, 0);
  for (const auto& [ei, ci] : sparse) {
    for (const auto& [ej, cj] : sparse) {
      if (ei + ej >= len) break;
      sq[ei + ej] += ci * cj;
    }
  }
  return sq;
}

template <std::size_t I>
std::vector<std::uint32_t> eighth_power_mod(const std::vector<std::int64_t>& e2,
                                            std::size_t len) {
  constexpr std::uint32_t P = kPrimes[I];
  std::vector<std::uint32_t> a(len);
  for (std::size_t i = 0; i < len; ++i) {
    std::int64_t r = e2[i] % static_cast<std::int64_t>(P);
    a[i] = static_cast<std::uint32_t>(r < 0 ? r + P : r);
  }
  Ntt<P> ntt;
  a = ntt.square(std::move(a), len);
  return ntt.square(std::move(a), len);
}

using boost::multiprecision::int256_t;

}  // namespace

std::vector<int128> tau_table(std::size_t N) {
  if (N == 0) throw DomainError("tau_table: N must be at least 1");
  if (2 * N > (std::size_t{1} << 25))
    throw RangeError("tau_table: N exceeds the transform length limit");
  const std::size_t len = N;  // tau(n) is the coefficient of q^{n-1} in E^8
  const auto e2 = jacobi_cube_squared(len);
  std::array<std::vector<std::uint32_t>, 5> res = {
      eighth_power_mod<0>(e2, len), eighth_power_mod<1>(e2, len),
      eighth_power_mod<2>(e2, len), eighth_power_mod<3>(e2, len),
      eighth_power_mod<4>(e2, len)};

  // Garner mixed-radix reconstruction.
  std::array<std::array<std::uint64_t, 5>, 5> inv{};
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < i; ++j)
      inv[j][i] = pow_mod(kPrimes[j] % kPrimes[i], kPrimes[i] - 2, kPrimes[i]);
  int256_t modulus = 1;
  for (auto p : kPrimes) modulus *= p;
  const int256_t half = modulus / 2;
  const int256_t lim = (int256_t(1) << 127) - 1;

  std::vector<int128> tau(N);
  for (std::size_t n = 0; n < len; ++n) {
    std::array<std::uint64_t, 5> x{};
    for (std::size_t i = 0; i < 5; ++i) {
      std::uint64_t v = res[i][n];
      for (std::size_t j = 0; j < i; ++j) {
        std::uint64_t d = (v + kPrimes[i] - x[j] % kPrimes[i]) % kPrimes[i];
        v = d * inv[j][i] % kPrimes[i];
      }
      x[i] = v;
    }
    int256_t value = 0;
    int256_t radix = 1;
    for (std::size_t i = 0; i < 5; ++i) {
      value += radix * x[i];
      radix *= kPrimes[i];
    }
    if (value > half) value -= modulus;
    if (value > lim || value < -lim)
      throw OverflowError("tau_table: coefficient " + std::to_string(n + 1) +
                          " exceeds 128-bit range");
    const bool neg = value < 0;
    int256_t mag = neg ? -value : value;
    unsigned __int128 u =
        (static_cast<unsigned __int128>(static_cast<std::uint64_t>(mag >> 64)) << 64) |
        static_cast<std::uint64_t>(mag & int256_t(~std::uint64_t{0}));
    tau[n] = neg ? -static_cast<int128>(u) : static_cast<int128>(u);
  }
  return tau;
}

HeckeForm::HeckeForm(int weight, std::vector<int128> tau)
    : weight_(weight), tau_(std::move(tau)), lambda_(tau_.size() + 1, 0.0) {
  if (weight <= 0 || weight % 2 != 0)
    throw DomainError("HeckeForm: weight must be even and positive");
  if (tau_.empty() || tau_[0] != 1)
    throw DomainError("HeckeForm: coefficient table must start with tau(1)=1");
  const long double half = (weight - 1) / 2.0L;
  for (std::size_t n = 1; n <= tau_.size(); ++n) {
    lambda_[n] = static_cast<double>(static_cast<long double>(tau_[n - 1]) /
                                     std::pow(static_cast<long double>(n), half));
  }
}

HeckeForm HeckeForm::delta(std::size_t N) { return HeckeForm(12, tau_table(N)); }

int128 HeckeForm::tau(std::uint64_t n) const {
  if (n == 0 || n > tau_.size())
    throw RangeError("tau: n=" + std::to_string(n) + " outside cache");
  return tau_[n - 1];
}

double HeckeForm::lambda_prime_power(std::uint64_t p, int e) const {
  if (e == 0) return 1.0;
  if (p > size())
    throw RangeError("lambda: prime " + std::to_string(p) + " outside cache");
  double prev = 1.0, cur = lambda_[p];
  const double lp = cur;
  for (int j = 1; j < e; ++j) {
    double next = lp * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double HeckeForm::lambda(std::uint64_t n) const {
  if (n == 0) throw DomainError("lambda: n must be positive");
  if (n <= size()) return lambda_[n];
  double v = 1.0;
  for (const auto& pp : factorize(n)) {
    std::uint64_t pe = 1;
    for (int j = 0; j < pp.e; ++j) pe *= pp.p;
    v *= pe <= size() ? lambda_[pe] : lambda_prime_power(pp.p, pp.e);
  }
  return v;
}

double HeckeForm::sigma_prime_power(std::uint64_t p, int e) const {
  double prev = 1.0, cur = lambda(p), sum = 1.0;
  if (e >= 1) sum += cur;
  const double lp = cur;
  for (int j = 1; j < e; ++j) {
    double next = lp * cur - prev;
    prev = cur;
    cur = next;
    sum += cur;
  }
  return sum;
}

double HeckeForm::sigma(std::uint64_t n) const {
  double v = 1.0;
  for (const auto& pp : factorize(n)) v *= sigma_prime_power(pp.p, pp.e);
  return v;
}

std::pair<std::complex<double>, std::complex<double>> HeckeForm::local_roots(
    std::uint64_t p) const {
  const double lp = lambda(p);
  const double disc = lp * lp - 4.0;
  if (disc <= 0) {
    const double im = std::sqrt(-disc) / 2.0;
    return {{lp / 2.0, im}, {lp / 2.0, -im}};
  }
  const double r = std::sqrt(disc) / 2.0;
  return {{lp / 2.0 + r, 0.0}, {lp / 2.0 - r, 0.0}};
}

std::vector<double> sigma_f_table(std::size_t N, const HeckeForm& form) {
  if (N > form.size())
    throw RangeError("sigma_f_table: N exceeds the coefficient cache");
  const auto lam = form.lambda_table();
  std::vector<double> s(N + 1, 0.0);
  for (std::size_t m = 1; m <= N; ++m)
    for (std::size_t k = m; k <= N; k += m) s[k] += lam[m];
  return s;
}

std::vector<std::uint64_t> deligne_check(std::size_t N, const HeckeForm& form,
                                         double tol) {
  if (N > form.size())
    throw RangeError("deligne_check: N exceeds the coefficient cache");
  std::vector<std::uint32_t> d(N + 1, 0);
  for (std::size_t m = 1; m <= N; ++m)
    for (std::size_t k = m; k <= N; k += m) ++d[k];
  const auto lam = form.lambda_table();
  std::vector<std::uint64_t> bad;
  for (std::size_t n = 1; n <= N; ++n)
    if (std::abs(lam[n]) > d[n] + tol) bad.push_back(n);
  return bad;
}

PrimeSumReport prime_sum_report(double x, const HeckeForm& form) {
  if (!(x >= 2)) throw DomainError("prime_sum_report: x must be at least 2");
  const auto limit = static_cast<std::uint64_t>(std::floor(x));
  if (limit > form.size())
    throw RangeError("prime_sum_report: x exceeds the coefficient cache");
  double s1 = 0, s2 = 0, s3 = 0;
  for (auto p : primes_up_to(limit)) {
    const double lp = form.lambda_table()[p];
    const double pd = static_cast<double>(p);
    s1 += 1.0 / pd;
    s2 += lp * lp / pd;
    s3 += std::log(pd) / pd;
  }
  const double ll = std::log(std::log(x));
  return {x, s1 - ll, s2 - ll, s3 - std::log(x)};
}

void write_coefficient_csv(const std::filesystem::path& path,
                           const HeckeForm& form) {
  std::ostringstream os;
  os.precision(17);
  os << "n,tau,lambda\n";
  for (std::size_t n = 1; n <= form.size(); ++n)
    os << n << ',' << to_string(form.tau(n)) << ',' << form.lambda_table()[n]
       << '\n';
  write_file_atomic(path, os.str());
}

HeckeForm read_coefficient_csv(const std::filesystem::path& path, int weight) {
  std::ifstream in(path);
  if (!in) throw RangeError("cannot open coefficient cache " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "n,tau,lambda")
    throw DomainError("coefficient cache " + path.string() + " has a bad header");
  std::vector<int128> tau;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto c1 = line.find(',');
    auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw DomainError("coefficient cache line " + std::to_string(lineno) +
                        " is malformed");
    if (std::stoull(line.substr(0, c1)) != tau.size() + 1)
      throw DomainError("coefficient cache line " + std::to_string(lineno) +
                        " is out of order");
    tau.push_back(parse_int128(line.substr(c1 + 1, c2 - c1 - 1)));
  }
  return HeckeForm(weight, std::move(tau));
}

}  // namespace qtwist
