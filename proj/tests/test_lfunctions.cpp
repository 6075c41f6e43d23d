#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "qtwist/characters.hpp"
#include "qtwist/errors.hpp"
#include "qtwist/lfunctions.hpp"

using namespace qtwist;

namespace {

constexpr double kPi = std::numbers::pi;

// Hurwitz zeta(s, a) for real s != 1 by Euler-Maclaurin with N = 40.
double hurwitz(double s, double a) {
  constexpr int N = 40;
  double sum = 0.0;
  for (int k = 0; k < N; ++k) sum += std::pow(k + a, -s);
  const double x = N + a;
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  // B_2j / (2j)!
  const double b[] = {1.0 / 12, -1.0 / 720, 1.0 / 30240, -1.0 / 1209600, 1.0 / 47900160};
  double rising = s;  // s (s+1) ... (s+2j-2)
  for (int j = 1; j <= 5; ++j) {
    sum += b[j - 1] * rising * std::pow(x, -s - 2 * j + 1);
    rising *= (s + 2 * j - 1) * (s + 2 * j);
  }
  return sum;
}

// L(s, chi_8d) = q^{-s} sum_{a mod q} chi(a) zeta(s, a/q).
double l_chi_hurwitz(std::uint64_t d, double s) {
  const std::uint64_t q = 8 * d;
  double sum = 0.0;
  for (std::uint64_t a = 1; a < q; ++a) {
    const int c = chi8d(d, a);
    if (c != 0) sum += c * hurwitz(s, static_cast<double>(a) / static_cast<double>(q));
  }
  return std::pow(static_cast<double>(q), -s) * sum;
}

std::shared_ptr<const HeckeForm> delta_form(std::size_t N) {
  return std::make_shared<const HeckeForm>(HeckeForm::delta(N));
}

}  // namespace

TEST_CASE("Euler-Maclaurin oracle reproduces zeta(2)") {
  CHECK(hurwitz(2.0, 1.0) == doctest::Approx(kPi * kPi / 6).epsilon(1e-14));
  CHECK(hurwitz(0.5, 1.0) == doctest::Approx(-1.4603545088095868).epsilon(1e-13));
}

TEST_CASE("quadratic central values match the Hurwitz oracle") {
  const AfeEngine unit(delta_form(2000), Kernel::unit);
  for (std::uint64_t d : {1ULL, 5ULL, 13ULL, 35ULL}) {
    const double oracle = l_chi_hurwitz(d, 0.5);
    CHECK(std::abs(l_quadratic_central(d, unit) - oracle) < 1e-11);
  }
}

TEST_CASE("quadratic central value is independent of the kernel") {
  const AfeEngine unit(delta_form(2000), Kernel::unit);
  // The gaussian cutoff decays slowly, so it needs a longer table.
  const AfeEngine gauss(delta_form(200000), Kernel::gaussian);
  for (std::uint64_t d : {1ULL, 3ULL, 7ULL})
    CHECK(std::abs(l_quadratic_central(d, unit) - l_quadratic_central(d, gauss)) < 1e-10);
  CHECK_THROWS_AS(l_modular_central(3, gauss), DomainError);
}

TEST_CASE("self-dual evaluator: quadratic characters") {
  for (std::uint64_t d : {1ULL, 5ULL, 13ULL}) {
    const double q = 8.0 * static_cast<double>(d);
    const GammaWeight g{{{0.0, 0.5}}, 0.5 * std::log(q / kPi)};
    const double v = self_dual_value([&](std::uint64_t n) { return double(chi8d(d, n)); }, g, 0.5, 4000);
    CHECK(std::abs(v - l_chi_hurwitz(d, 0.5)) < 1e-10);
  }
}

TEST_CASE("modular central values match the self-dual oracle") {
  const auto form = delta_form(20000);
  const AfeEngine engine(form, Kernel::unit);
  for (std::uint64_t d : {1ULL, 3ULL, 13ULL, 21ULL}) {
    const double q = 8.0 * static_cast<double>(d);
    const GammaWeight g{{{5.5, 1.0}}, std::log(q / (2 * kPi))};
    const double oracle = self_dual_value(
        [&](std::uint64_t n) { return form->lambda(n) * chi8d(d, n); }, g, 0.5, 2000);
    CHECK(std::abs(l_modular_central(d, engine) - oracle) < 1e-10);
  }
}

TEST_CASE("functional equation and off-centre values") {
  const double q = 8.0;
  const GammaWeight g{{{0.0, 0.5}}, 0.5 * std::log(q / kPi)};
  auto chi = [](std::uint64_t n) { return double(chi8d(1, n)); };
  for (double s : {0.3, 0.8}) {
    const double lhs = std::exp(0.5 * s * std::log(q / kPi) + std::lgamma(s / 2)) * l_chi_hurwitz(1, s);
    const double rhs = std::exp(0.5 * (1 - s) * std::log(q / kPi) + std::lgamma((1 - s) / 2)) *
                       l_chi_hurwitz(1, 1 - s);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    CHECK(self_dual_value(chi, g, s, 4000) == doctest::Approx(l_chi_hurwitz(1, s)).epsilon(1e-10));
  }
}

TEST_CASE("joint sum agrees with the product of the two central values") {
  const std::uint64_t d_max = 61;
  const std::size_t need = AfeEngine::joint_coefficients_needed(d_max);
  const AfeEngine engine(delta_form(need + 10), Kernel::unit, need);
  CHECK(engine.joint_d_limit() >= d_max);
  const auto records = afe_cross_check(d_max, engine);
  CHECK(records.size() == 26);  // odd square-free d <= 61
  for (const auto& r : records) {
    CHECK(r.rel_discrepancy <= 1e-5);
    CHECK(std::abs(r.joint - r.L_chi * r.L_fchi) < 1e-8);
    CHECK(r.terms_used == engine.joint_terms(r.d));
    CHECK(joint_product_afe(r.d, engine, AfeRoute::joint) == r.joint);
    CHECK(joint_product_afe(r.d, engine) == r.L_chi * r.L_fchi);
  }
}

TEST_CASE("central values of the twisted modular form are non-negative") {
  const AfeEngine engine(delta_form(40000), Kernel::unit);
  for (std::uint64_t d = 1; d < 150; d += 2)
    if (is_squarefree(d)) CHECK(l_modular_central(d, engine) > -1e-10);
}

TEST_CASE("routes, work counts and errors") {
  const AfeEngine engine(delta_form(5000), Kernel::unit);
  CHECK(parse_route("joint") == AfeRoute::joint);
  CHECK(std::string(route_name(AfeRoute::product)) == "product");
  CHECK_THROWS_AS(parse_route("both"), DomainError);
  CHECK(route_terms(101, engine, AfeRoute::product) ==
        engine.quadratic_terms(101) / 2 + engine.modular_terms(101) / 2);
  // The product route grows linearly in d, the joint route like d^{3/2}.
  CHECK(engine.modular_terms(400) == doctest::Approx(4.0 * engine.modular_terms(100)).epsilon(0.01));
  CHECK(double(engine.joint_terms(400)) == doctest::Approx(8.0 * engine.joint_terms(100)).epsilon(0.01));
  CHECK_THROWS_AS(l_quadratic_central(4, engine), DomainError);
  CHECK_THROWS_AS(l_quadratic_central(9, engine), DomainError);
  std::uint64_t far = engine.modular_d_limit() + 200;
  while (far % 2 == 0 || !is_squarefree(far)) ++far;
  CHECK_THROWS_AS(l_modular_central(far, engine), RangeError);
  CHECK_THROWS_AS(engine.joint(KroneckerTable(3)), RangeError);
  CHECK(relative_discrepancy(1.0, 0.0) == doctest::Approx(1000.0));
  CHECK(relative_discrepancy(2.0, 1.0) == doctest::Approx(1.0));
}
