#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "qtwist/arith.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/eulerprod.hpp"
#include "qtwist/special.hpp"

using namespace qtwist;

namespace {

constexpr double kPi = std::numbers::pi;

const HeckeForm& delta() {
  static const HeckeForm f = HeckeForm::delta(100002);
  return f;
}

// L(s, Delta) from the Mellin integral of Delta(iy) split at y = 1.
double l_delta_oracle(double s) {
  const auto& f = delta();
  const double k = 5.5;
  double sum = 0.0;
  for (std::uint64_t n = 1; n <= 60; ++n) {
    const double x = 2 * kPi * static_cast<double>(n);
    const double lam = f.lambda(n);
    sum += lam * std::pow(static_cast<double>(n), -s) * boost::math::gamma_q(s + k, x);
    sum += lam * std::pow(2 * kPi, 2 * s - 1) * std::pow(static_cast<double>(n), s - 1) *
           std::exp(std::lgamma(1 + k - s) - std::lgamma(s + k)) * boost::math::gamma_q(1 + k - s, x);
  }
  return sum;
}

// Z(s, l) as a plain Dirichlet series over odd m <= M, weight over p | lm.
double Z_series_oracle(double s, std::uint64_t l, std::uint64_t l1, std::uint64_t M,
                       const std::vector<double>& sigma) {
  double sum = 0.0;
  for (std::uint64_t m = 1; m <= M; m += 2) {
    double w = 1.0;
    for (const auto& pp : factorize(l * m)) w *= double(pp.p) / double(pp.p + 1);
    sum += sigma[l1 * m * m] * w * std::pow(double(m), -s);
  }
  return sum;
}

}  // namespace

TEST_CASE("local algebra: symmetric square factor and square-indexed series") {
  const auto& f = delta();
  for (std::uint64_t p : {3, 5, 7, 11}) {
    const auto [a, b] = f.local_roots(p);
    for (double x : {0.5, 0.1, 1.0 / 9.0}) {
      const double direct = ((1.0 - x) * (1.0 - a * a * x) * (1.0 - b * b * x)).real();
      CHECK(sym2_local_inverse(f.lambda(p), x) == doctest::Approx(direct).epsilon(1e-13));
      double even = 0.0, odd = 0.0;
      const double y = x * x;
      for (int h = 0; h < 60; ++h) {
        even += f.sigma_prime_power(p, 2 * h) * std::pow(y, h);
        odd += f.sigma_prime_power(p, 2 * h + 1) * std::pow(y, h);
      }
      CHECK(even_square_series(f.lambda(p), y) == doctest::Approx(even).epsilon(1e-12));
      CHECK(odd_square_series(f.lambda(p), y) == doctest::Approx(odd).epsilon(1e-12));
    }
  }
}

TEST_CASE("L(s, f) matches the Mellin oracle") {
  for (double s : {0.5, 1.0, 1.5, 2.0, 3.0})
    CHECK(l_modular_at(s, delta()) == doctest::Approx(l_delta_oracle(s)).epsilon(1e-11));
  // Absolutely convergent region: Euler product over p <= 1e5.
  double prod = 1.0;
  for (auto p : primes_up_to(100000)) {
    const double x = std::pow(double(p), -3.0);
    prod /= 1.0 - delta().lambda(p) * x + x * x;
  }
  CHECK(l_modular_at(3.0, delta()) == doctest::Approx(prod).epsilon(1e-10));
}

TEST_CASE("L(s, sym^2 f) matches its Euler product where it converges") {
  for (double s : {2.0, 3.0}) {
    double prod = 1.0;
    for (auto p : primes_up_to(100000)) prod /= sym2_local_inverse(delta().lambda(p), std::pow(double(p), -s));
    const double tol = s == 2.0 ? 1e-5 : 1e-10;
    CHECK(l_sym2_at(s, delta()) == doctest::Approx(prod).epsilon(tol));
  }
}

TEST_CASE("reference values at s = 1") {
  const EulerProdSpec spec;
  const auto r = reference_values(delta(), spec);
  CHECK(r.zeta2 == doctest::Approx(kPi * kPi / 6));
  CHECK(r.zeta2_odd == doctest::Approx(0.75 * r.zeta2));
  CHECK(r.L1f == doctest::Approx(l_delta_oracle(1.0) * (1.0 - delta().lambda(2) / 2 + 0.25)).epsilon(1e-11));
  // The products at s = 1 converge only conditionally; they land near the
  // analytic values.
  CHECK(std::abs(r.L1f_euler.value / r.L1f - 1.0) < 0.05);
  CHECK(std::abs(r.L1sym2_euler.value / r.L1sym2 - 1.0) < 0.05);
  CHECK_THROWS_AS(reference_values(delta(), {50, 1.0}), DomainError);
}

TEST_CASE("Z(s, l): closed form against an independent series") {
  const EulerProdSpec spec;
  const auto sigma = sigma_f_table(100002, delta());
  for (std::int64_t l : {1, 3, 9, 15}) {
    const auto ti = twist_index(l);
    const std::uint64_t M = ti.l1 == 1 ? 301 : 81;
    const auto z = Z_dual(3.0, ti, M, delta(), spec);
    CHECK(z.series == doctest::Approx(Z_series_oracle(3.0, ti.l, ti.l1, M, sigma)).epsilon(1e-12));
    CHECK(z.residual < 1e-3);  // truncated at small M here
  }
  const auto z3 = Z_dual(3.0, twist_index(1), 10000, delta(), spec);
  CHECK(z3.residual < 1e-8);
  CHECK_THROWS_AS(Z_dual(1.0, twist_index(1), 10, delta(), spec), DomainError);
}

TEST_CASE("local series identities") {
  for (std::uint64_t p : {3, 5, 7, 13})
    for (auto b : {LocalBranch::even, LocalBranch::odd, LocalBranch::generic})
      for (double s : {1.0, 2.0}) CHECK(local_series_identity(p, s, b, delta()).residual < 1e-10);
}

TEST_CASE("J local factor: series with exact Gauss sums against the closed form") {
  for (std::uint64_t p : {3, 5, 7})
    for (int l_p = 0; l_p <= 2; ++l_p)
      for (int iota : {1, -1})
        for (std::int64_t k1 : {std::int64_t{1}, static_cast<std::int64_t>(p)})
          for (bool two_a : {false, true}) {
            JParams jp{p, 2.0, 1.5, iota, k1, l_p, two_a};
            CHECK(J_local_dual(jp, delta()).residual < 1e-8);
            CHECK(J_resolved_dual(jp, delta()).residual < 1e-8);
          }
  CHECK_THROWS_AS(J_local_dual({3, 1.0, 1.5, 1, 1, 0, false}, delta()), DomainError);
}

TEST_CASE("K, E and F") {
  for (std::uint64_t p : {3, 5, 7, 11}) {
    CHECK(K1_p(0.0, p, delta()).residual < 1e-10);
    CHECK(K1_p(0.7, p, delta()).residual < 1e-10);
    for (int l_p = 1; l_p <= 3; ++l_p) CHECK(E_p_dual(0.0, p, l_p, delta()).residual < 1e-10);
  }
  const EulerProdSpec spec;
  for (std::int64_t l : {1, 3, 15}) {
    const auto suite = K1_E_F_suite(twist_index(l), 0.0, delta(), spec, 10000);
    CHECK(suite.residual < 1e-6);
    CHECK(suite.a_tail < 1e-6);
    for (const auto& row : suite.rows) {
      CHECK(row.K1.residual < 1e-10);
      CHECK(row.E.residual < 1e-10);
    }
  }
}

TEST_CASE("main term constants and slopes") {
  const EulerProdSpec spec;
  const auto k = main_term_constants(delta(), spec);
  CHECK(k.phi_hat_1 == doctest::Approx(0.0070298584066).epsilon(1e-9));
  const auto one = twist_index(1);
  const double proof = main_term_slope(ConstantForm::proof_form, one, delta(), k);
  const double theorem = main_term_slope(ConstantForm::theorem_form, one, delta(), k);
  CHECK(proof == doctest::Approx(k.phi_hat_1 * k.L1sym2 * k.L1f * k.H1 / (4 * k.zeta2_odd)));
  CHECK(theorem == doctest::Approx(k.phi_hat_1 * k.H1 / (3 * k.zeta2)));
  CHECK(proof > 0);
  CHECK(theorem > 0);
  CHECK(parse_constant_form("theorem_form") == ConstantForm::theorem_form);
  CHECK_THROWS(parse_constant_form("other"));

  // Bracket and envelope for l = 3.
  const auto ti = twist_index(3);
  const auto mt = main_term({ti, 8000.0, 0.4, 2.0, ConstantForm::proof_form}, delta(), k);
  const double lam = delta().lambda(3);
  const double want = std::log(8000.0 / 3) + 0.4 - std::log(3.0) + 2 * lam * std::log(3.0) / (1 + lam + 1.0 / 3);
  CHECK(mt.bracket == doctest::Approx(want).epsilon(1e-13));
  CHECK(mt.predicted == doctest::Approx(mt.prefactor * want).epsilon(1e-13));
  CHECK(mt.envelope == doctest::Approx(std::abs(mt.prefactor) * 2.0 * std::log(3.0) / 3).epsilon(1e-13));
  // l = 9: l1 = 1, so only the envelope sees p = 3.
  const auto mt9 = main_term({twist_index(9), 8000.0, 0.4, 2.0, ConstantForm::proof_form}, delta(), k);
  CHECK(mt9.bracket == doctest::Approx(std::log(8000.0) + 0.4).epsilon(1e-13));
  CHECK_THROWS_AS(main_term({twist_index(15), 10.0, 0.0, 2.0, ConstantForm::proof_form}, delta(), k), DomainError);
}
