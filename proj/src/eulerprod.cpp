#include "qtwist/eulerprod.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/zeta.hpp>

#include "qtwist/errors.hpp"
#include "qtwist/lfunctions.hpp"
#include "qtwist/special.hpp"

namespace qtwist {

namespace {

constexpr int kTrunc = 60;

double rel(double series, double closed) {
  return std::abs(series - closed) / std::max(std::abs(closed), 1e-300);
}

DualResult dual(double series, double closed) { return {series, closed, rel(series, closed)}; }

double pw(std::uint64_t p, double e) { return std::pow(static_cast<double>(p), e); }

std::vector<std::uint64_t> odd_primes(std::uint64_t P) {
  auto ps = primes_up_to(P);
  if (!ps.empty() && ps.front() == 2) ps.erase(ps.begin());
  return ps;
}

// sigma_f(p^0 .. p^n) from the Hecke recursion.
std::vector<double> sigma_powers(std::uint64_t p, int n, const HeckeForm& form) {
  const double lp = form.lambda(p);
  std::vector<double> sig(static_cast<std::size_t>(n) + 1);
  double prev = 1.0, cur = lp, acc = 1.0;
  sig[0] = 1.0;
  for (int j = 1; j <= n; ++j) {
    if (j > 1) {
      const double next = lp * cur - prev;
      prev = cur;
      cur = next;
    }
    acc += cur;
    sig[static_cast<std::size_t>(j)] = acc;
  }
  return sig;
}

// Resolved local factor (1 - p^{-v}) J_{iota k1, p}(v, w) in closed form,
// chi = (iota k1 / p) when p does not divide k1.
double J_resolved_closed(std::uint64_t p, double v, double w, bool p_div_k1, int chi, int l_p,
                         double lam) {
  const double y = pw(p, -2.0 * w - v);
  const double se = even_square_series(lam, y);
  const double so = odd_square_series(lam, y);
  const double q = 1.0 - 1.0 / static_cast<double>(p);
  double first;
  if (l_p == 0)
    first = 1.0 + q * (se - 1.0);
  else if (l_p % 2 == 0)
    first = pw(p, -l_p * v / 2.0) * q * se;
  else
    first = q * pw(p, -w - (1 + l_p) * v / 2.0) * so;
  double second;
  if (!p_div_k1) {
    second = chi / std::sqrt(static_cast<double>(p)) *
             (l_p % 2 == 1 ? pw(p, -(l_p - 1) * v / 2.0) * se : pw(p, -w - l_p * v / 2.0) * so);
  } else {
    double inner;
    if (l_p == 0)
      inner = pw(p, v) * (se - 1.0);
    else if (l_p % 2 == 0)
      inner = pw(p, -(l_p / 2.0 - 1.0) * v) * se;
    else
      inner = pw(p, -w - (l_p - 1) * v / 2.0) * so;
    second = -inner / static_cast<double>(p);
  }
  return first + (1.0 - pw(p, -v)) * second;
}

// (1 - 1/p)(1 - lambda/p + 1/p^2) = 1/(zeta_p(1) L_p(1, f)).
double lead_factor(std::uint64_t p, double lam) {
  const double pd = static_cast<double>(p);
  return (1.0 - 1.0 / pd) * (1.0 - lam / pd + 1.0 / (pd * pd));
}

double K1_p_closed(double v, std::uint64_t p, double lam) {
  return lead_factor(p, lam) * J_resolved_closed(p, v, 0.5, false, 1, 0, lam);
}

void check_J_params(const JParams& jp) {
  if (jp.p % 2 == 0 || jp.p < 3) throw DomainError("J: p must be an odd prime");
  if (jp.iota != 1 && jp.iota != -1) throw DomainError("J: iota must be +1 or -1");
  if (jp.l_p < 0) throw DomainError("J: l_p must be non-negative");
}

int unit_symbol(const JParams& jp, bool p_div_k1) {
  const auto p = static_cast<std::int64_t>(jp.p);
  const std::int64_t m = jp.iota * jp.k1;
  return jacobi(p_div_k1 ? m / p : m, p);
}

}  // namespace

double prime_tail_envelope(const EulerProdSpec& spec) {
  const double P = static_cast<double>(spec.P);
  return spec.tail_constant * 3.0 / (P * std::log(P));
}

double sym2_local_inverse(double lambda_p, double x) {
  return (1.0 - x) * (1.0 - (lambda_p * lambda_p - 2.0) * x + x * x);
}

double even_square_series(double lambda_p, double y) {
  return (1.0 + (1.0 + lambda_p) * y) / sym2_local_inverse(lambda_p, y);
}

double odd_square_series(double lambda_p, double y) {
  return (1.0 + lambda_p + y) / sym2_local_inverse(lambda_p, y);
}

double H_p(double s, std::uint64_t p, const HeckeForm& form) {
  const double pd = static_cast<double>(p);
  const double lam = form.lambda(p);
  const double x = std::pow(pd, -s);
  return pd / (pd + 1.0) * (1.0 + (1.0 + lam) * x) + sym2_local_inverse(lam, x) / (pd + 1.0);
}

double Q_p_factor(double s, std::uint64_t p, const TwistIndex& ti, const HeckeForm& form) {
  const int e = ti.exponent(p);
  if (e == 0) return 1.0;
  const double h = H_p(s, p, form);
  if (std::abs(h) < 1e-12)
    throw SingularFactorError("H_p(s) vanishes at p = " + std::to_string(p));
  const double lam = form.lambda(p);
  const double x = std::pow(static_cast<double>(p), -s);
  return (e % 2 == 1 ? 1.0 + lam + x : 1.0 + (1.0 + lam) * x) / h;
}

double Q_product(double s, const TwistIndex& ti, const HeckeForm& form) {
  double q = 1.0;
  for (const auto& pp : ti.prime_factors) q *= Q_p_factor(s, pp.p, ti, form);
  return q;
}

Estimate H_script(double s, const HeckeForm& form, const EulerProdSpec& spec) {
  if (!(s > 0.5)) throw DomainError("H(s) requires s > 1/2");
  double prod = 1.0;
  for (auto p : odd_primes(spec.P)) {
    const double x = std::pow(static_cast<double>(p), -s);
    const double lam = form.lambda(p);
    const double h = H_p(s, p, form);
    if (std::abs(h) < 1e-12)
      throw SingularFactorError("H_p(s) vanishes at p = " + std::to_string(p));
    prod *= (1.0 - x) * (1.0 - lam * x + x * x) * h;
  }
  return {prod, std::abs(prod) * prime_tail_envelope(spec)};
}

double l_modular_at(double s, const HeckeForm& form) {
  GammaWeight g{{{(form.weight() - 1) / 2.0, 1.0}}, -std::log(2.0 * std::numbers::pi)};
  return self_dual_value([&](std::uint64_t n) { return form.lambda(n); }, g, s);
}

double l_sym2_at(double s, const HeckeForm& form) {
  const double k = form.weight();
  GammaWeight g{{{0.5, 0.5}, {(k - 1) / 2.0, 0.5}, {k / 2.0, 0.5}},
                -1.5 * std::log(std::numbers::pi)};
  // zeta(2s) sum lambda(n^2) n^{-s}: A(p^e) = sum_{j <= e/2} lambda(p^{2(e - 2j)}).
  auto coeff = [&](std::uint64_t n) {
    double a = 1.0;
    for (const auto& pp : factorize(n)) {
      double loc = 0.0;
      for (int j = 0; 2 * j <= pp.e; ++j) loc += form.lambda_prime_power(pp.p, 2 * (pp.e - 2 * j));
      a *= loc;
    }
    return a;
  };
  return self_dual_value(coeff, g, s);
}

ReferenceValues reference_values(const HeckeForm& form, const EulerProdSpec& spec) {
  if (spec.P < 100) throw DomainError("EulerProdSpec: P must be at least 100");
  ReferenceValues r;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  r.zeta2 = pi2 / 6.0;
  r.zeta2_odd = pi2 / 8.0;
  const double l2 = form.lambda(2);
  r.L1f = l_modular_at(1.0, form) * (1.0 - l2 / 2.0 + 0.25);
  r.L1sym2 = l_sym2_at(1.0, form) * sym2_local_inverse(l2, 0.5);
  double pf = 1.0, ps = 1.0;
  for (auto p : odd_primes(spec.P)) {
    const double lam = form.lambda(p);
    const double x = 1.0 / static_cast<double>(p);
    pf /= 1.0 - lam * x + x * x;
    ps /= sym2_local_inverse(lam, x);
  }
  r.L1f_euler = {pf, std::abs(pf) * prime_tail_envelope(spec)};
  r.L1sym2_euler = {ps, std::abs(ps) * prime_tail_envelope(spec)};
  return r;
}

DualResult Z_dual(double s, const TwistIndex& ti, std::uint64_t M, const HeckeForm& form,
                  const EulerProdSpec& spec) {
  if (!(s > 1)) throw DomainError("Z_dual requires s > 1");
  double series = 0.0;
  for (std::uint64_t m = 1; m <= M; m += 2) {
    Factorization f = factorize(m);
    for (auto& pp : f) pp.e *= 2;
    for (const auto& lp : ti.prime_factors) {
      auto it = std::find_if(f.begin(), f.end(), [&](const PrimePower& x) { return x.p == lp.p; });
      if (it == f.end()) f.push_back({lp.p, lp.e % 2});
      else it->e += lp.e % 2;
    }
    double sig = 1.0, weight = 1.0;
    for (const auto& pp : f) {
      if (pp.p > form.size()) throw RangeError("Z_dual: sigma needs lambda beyond the cache");
      sig *= form.sigma_prime_power(pp.p, pp.e);
      weight *= static_cast<double>(pp.p) / (static_cast<double>(pp.p) + 1.0);
    }
    series += sig * weight * std::pow(static_cast<double>(m), -s);
  }

  const double l2 = form.lambda(2);
  const double x2 = std::pow(2.0, -s);
  double closed = (1.0 - x2) * boost::math::zeta(s);
  closed *= l_sym2_at(s, form) * sym2_local_inverse(l2, x2);
  closed *= l_modular_at(s, form) * (1.0 - l2 * x2 + x2 * x2);
  closed *= H_script(s, form, spec).value;
  for (const auto& pp : ti.prime_factors) {
    const double pd = static_cast<double>(pp.p);
    closed *= pd / (pd + 1.0) * Q_p_factor(s, pp.p, ti, form);
  }
  return dual(series, closed);
}

const char* branch_name(LocalBranch b) {
  switch (b) {
    case LocalBranch::even:
      return "even";
    case LocalBranch::odd:
      return "odd";
    case LocalBranch::generic:
      return "generic";
  }
  return "?";
}

DualResult local_series_identity(std::uint64_t p, double s, LocalBranch branch,
                                 const HeckeForm& form) {
  const double pd = static_cast<double>(p);
  const double x = std::pow(pd, -s);
  const double lam = form.lambda(p);
  const auto sig = sigma_powers(p, 2 * kTrunc + 1, form);
  const auto [alpha, beta] = form.local_roots(p);
  const double sym2 =
      1.0 / ((1.0 - x) * ((1.0 - alpha * alpha * x) * (1.0 - beta * beta * x)).real());

  double series = 0.0, xp = 1.0;
  switch (branch) {
    case LocalBranch::even: {
      for (int h = 0; h <= kTrunc; ++h, xp *= x) series += sig[static_cast<std::size_t>(2 * h)] * xp;
      return dual(series, sym2 * (1.0 + (1.0 + lam) * x));
    }
    case LocalBranch::odd: {
      for (int h = 0; h <= kTrunc; ++h, xp *= x)
        series += sig[static_cast<std::size_t>(2 * h + 1)] * xp;
      const double product = sym2 * (1.0 + lam + x);
      const double ratio =
          (1.0 + (1.0 + lam) / x) / (1.0 / x + 1.0 + lam) * sym2 * (1.0 + (1.0 + lam) * x);
      DualResult r = dual(series, product);
      r.residual = std::max(r.residual, rel(series, ratio));
      return r;
    }
    case LocalBranch::generic: {
      series = 1.0;
      xp = x;
      for (int h = 1; h <= kTrunc; ++h, xp *= x)
        series += sig[static_cast<std::size_t>(2 * h)] * xp * pd / (pd + 1.0);
      return dual(series, sym2 * H_p(s, p, form));
    }
  }
  return {};
}

DualResult J_local_dual(const JParams& jp, const HeckeForm& form) {
  check_J_params(jp);
  if (jp.v < 1.1 || jp.w < 0.1)
    throw DomainError("J_local_dual: (v, w) outside the absolute-convergence zone");
  const std::uint64_t p = jp.p;
  const double pv = pw(p, -jp.v);
  if (jp.p_divides_2a) {
    double series = 0.0, t = 1.0;
    for (int j = 0; j <= kTrunc; ++j, t *= pv) series += t;
    return dual(series, 1.0 / (1.0 - pv));
  }
  const bool pk = jp.k1 % static_cast<std::int64_t>(p) == 0;
  const int unit = unit_symbol(jp, pk);
  const auto sig = sigma_powers(p, kTrunc, form);
  double series = 0.0;
  for (int n = 0; n <= kTrunc; ++n) {
    const double an = sig[static_cast<std::size_t>(n)] * pw(p, -n * jp.w);
    for (int k2 = 0; k2 <= kTrunc; ++k2) {
      const double g = gauss_local_normalized(p, n + jp.l_p, 2 * k2 + (pk ? 1 : 0), unit);
      if (g != 0.0) series += an * pw(p, -k2 * jp.v) * g;
    }
  }
  const double lam = form.lambda(p);
  const double closed = J_resolved_closed(p, jp.v, jp.w, pk, unit, jp.l_p, lam) / (1.0 - pv);
  return dual(series, closed);
}

DualResult J_resolved_dual(const JParams& jp, const HeckeForm& form) {
  check_J_params(jp);
  if (jp.p_divides_2a) return {1.0, 1.0, 0.0};
  const std::uint64_t p = jp.p;
  const double pv = pw(p, -jp.v);
  const bool pk = jp.k1 % static_cast<std::int64_t>(p) == 0;
  const int e = pk ? 1 : 0;
  const int unit = unit_symbol(jp, pk);
  const auto sig = sigma_powers(p, kTrunc, form);
  double series = 0.0;
  for (int n = 0; n <= kTrunc; ++n) {
    const int b = n + jp.l_p;
    const double an = sig[static_cast<std::size_t>(n)] * pw(p, -n * jp.w);
    // k2 >= b/2 (b even): the geometric k2-sum times (1 - p^{-v}).
    if (b % 2 == 0) series += an * pw(p, -(b / 2) * jp.v) * gauss_local_normalized(p, b, b + e, unit);
    // The single k2 with 2 k2 + e + 1 = b.
    if ((b - 1 - e) >= 0 && (b - 1 - e) % 2 == 0) {
      const int k2 = (b - 1 - e) / 2;
      series += an * (1.0 - pv) * pw(p, -k2 * jp.v) * gauss_local_normalized(p, b, 2 * k2 + e, unit);
    }
  }
  const double closed = J_resolved_closed(p, jp.v, jp.w, pk, unit, jp.l_p, form.lambda(p));
  return dual(series, closed);
}

DualResult K1_p(double v, std::uint64_t p, const HeckeForm& form) {
  const auto sig = sigma_powers(p, 2 * kTrunc + 1, form);
  const double pd = static_cast<double>(p);
  double even = 0.0, odd = 0.0;
  for (int h = 0; h <= kTrunc; ++h) {
    const int n = 2 * h;
    const double phi_ratio = n == 0 ? 1.0 : 1.0 - 1.0 / pd;
    even += sig[static_cast<std::size_t>(n)] * pw(p, -n * (v + 1.0) / 2.0) * phi_ratio;
    odd += sig[static_cast<std::size_t>(2 * h + 1)] * pw(p, -h * (1.0 + v));
  }
  const double lam = form.lambda(p);
  const double series = lead_factor(p, lam) * (even + (1.0 - pw(p, -v)) / pd * odd);
  return dual(series, K1_p_closed(v, p, lam));
}

double I1_p(double v, std::uint64_t p, int l_p, const HeckeForm& form) {
  const double lam = form.lambda(p);
  const double resolved = l_p == 0 ? 1.0 : J_resolved_closed(p, v, 0.5, false, 1, l_p, lam);
  return resolved * lead_factor(p, lam) / K1_p_closed(v, p, lam);
}

double F_gen_p(double v, std::uint64_t p, const HeckeForm& form) {
  const double lam = form.lambda(p);
  const double K = K1_p(v, p, form).series;
  return K - pw(p, -(2.0 - v)) * lead_factor(p, lam);
}

DualResult E_p_dual(double v, std::uint64_t p, int l_p, const HeckeForm& form) {
  if (l_p <= 0) throw DomainError("E_p is defined for p | l");
  const double lam = form.lambda(p);
  const double pd = static_cast<double>(p);
  JParams jp;
  jp.p = p;
  jp.v = v;
  jp.w = 0.5;
  jp.l_p = l_p;
  const double direct = lead_factor(p, lam) * J_resolved_dual(jp, form).series / F_gen_p(v, p, form);

  const double x = pw(p, -1.0 - v);
  const double Lsym = 1.0 / sym2_local_inverse(lam, x);
  const double fgen_bracket = (1.0 - 1.0 / pd) * (1.0 + (1.0 + lam) * x) +
                              (1.0 / pd - pw(p, -(2.0 - v))) / Lsym +
                              (1.0 - pw(p, -v)) / pd * (1.0 + lam + x);
  const double fgen = Lsym * lead_factor(p, lam) * fgen_bracket;
  double branch;
  if (l_p % 2 == 1)
    branch = pw(p, -0.5 - (l_p - 1) * v / 2.0) * (1.0 - x) * (1.0 + lam * pw(p, -v) + x);
  else
    branch = pw(p, -l_p * v / 2.0) *
             (1.0 + lam / pd - lam * pw(p, -2.0 - v) - pw(p, -2.0 * (1.0 + v)));
  const double closed = Lsym * lead_factor(p, lam) * branch / fgen;
  return dual(direct, closed);
}

KEFSuite K1_E_F_suite(const TwistIndex& ti, double v, const HeckeForm& form,
                      const EulerProdSpec& spec, std::uint64_t a_max) {
  if (!(v > -0.95 && v < 0.95)) throw DomainError("K1_E_F_suite: v must lie in (-0.95, 0.95)");
  if (a_max > spec.P) throw DomainError("K1_E_F_suite: a-sum range exceeds the prime cutoff");
  KEFSuite out;
  out.a_max = a_max;
  std::vector<std::uint64_t> ps = {3, 5, 7};
  for (const auto& pp : ti.prime_factors)
    if (std::find(ps.begin(), ps.end(), pp.p) == ps.end()) ps.push_back(pp.p);
  std::sort(ps.begin(), ps.end());
  for (auto p : ps) {
    KEFSuite::PrimeRow row{p, ti.exponent(p), K1_p(v, p, form), {}};
    if (row.l_p > 0) row.E = E_p_dual(v, p, row.l_p, form);
    out.rows.push_back(row);
  }

  // F(0; l) from its definition.
  const auto primes = odd_primes(spec.P);
  double Kprod = 1.0;
  for (auto p : primes) Kprod *= K1_p_closed(0.0, p, form.lambda(p));
  double lpart = 1.0;
  for (const auto& pp : ti.prime_factors) lpart *= I1_p(0.0, pp.p, pp.e, form);

  const std::uint64_t a_hi = std::min<std::uint64_t>(2 * a_max, spec.P);
  const SieveTables st = sieve_tables(a_hi);
  std::vector<double> Ia(a_hi + 1, 0.0);
  for (auto p : primes) {
    if (p > a_hi) break;
    Ia[p] = I1_p(0.0, p, 0, form);
  }
  double sum = 0.0, tail = 0.0;
  for (std::uint64_t a = 1; a <= a_hi; a += 2) {
    if (st.moebius[a] == 0 || gcd_u64(a, ti.l) != 1) continue;
    double prod = 1.0;
    for (const auto& pp : factorize(a)) prod *= Ia[pp.p];
    const double term = st.moebius[a] * prod / (static_cast<double>(a) * static_cast<double>(a));
    if (a <= a_max) sum += term;
    else tail += term;
  }
  out.F_series = Kprod * lpart * sum;
  out.a_tail = std::abs(Kprod * lpart * tail);

  // Closed form with the same prime truncation.
  double Lsym = 1.0, H = 1.0, zeta2 = 1.0;
  for (auto p : primes) {
    const double lam = form.lambda(p);
    const double x = 1.0 / static_cast<double>(p);
    Lsym /= sym2_local_inverse(lam, x);
    H *= (1.0 - x) * (1.0 - lam * x + x * x) * H_p(1.0, p, form);
    zeta2 /= 1.0 - x * x;
  }
  double closed = Lsym * H / zeta2 / std::sqrt(static_cast<double>(ti.l1));
  for (const auto& pp : ti.prime_factors) {
    const double pd = static_cast<double>(pp.p);
    closed *= pd / (pd + 1.0) * Q_p_factor(1.0, pp.p, ti, form);
  }
  out.F_closed = closed;
  out.residual = rel(out.F_series, out.F_closed);
  return out;
}

const char* constant_form_name(ConstantForm f) {
  return f == ConstantForm::theorem_form ? "theorem_form" : "proof_form";
}

ConstantForm parse_constant_form(const std::string& s) {
  if (s == "theorem_form") return ConstantForm::theorem_form;
  if (s == "proof_form") return ConstantForm::proof_form;
  throw UsageError("unknown constant form '" + s + "'");
}

MainTermConstants main_term_constants(const HeckeForm& form, const EulerProdSpec& spec) {
  const ReferenceValues r = reference_values(form, spec);
  MainTermConstants k;
  k.phi_hat_1 = phi_hat(1.0).real();
  k.H1 = H_script(1.0, form, spec).value;
  k.zeta2 = r.zeta2;
  k.zeta2_odd = r.zeta2_odd;
  k.L1f = r.L1f;
  k.L1sym2 = r.L1sym2;
  return k;
}

double main_term_slope(ConstantForm f, const TwistIndex& ti, const HeckeForm& form,
                       const MainTermConstants& k) {
  const double q = Q_product(1.0, ti, form) / std::sqrt(static_cast<double>(ti.l1));
  if (f == ConstantForm::theorem_form) return k.phi_hat_1 * k.H1 * q / (3.0 * k.zeta2);
  double local = 1.0;
  for (const auto& pp : ti.prime_factors) {
    const double pd = static_cast<double>(pp.p);
    local *= pd / (pd + 1.0);
  }
  return k.phi_hat_1 * local * k.L1sym2 * k.L1f * k.H1 * q / (4.0 * k.zeta2_odd);
}

MainTerm main_term(const MainTermInputs& in, const HeckeForm& form, const MainTermConstants& k) {
  const auto bad = condition_check(in.ti, form, 1e-9);
  if (!bad.empty())
    throw ConditionError("1 + lambda(p) + 1/p vanishes at p = " + std::to_string(bad.front()) +
                         " dividing l1");
  if (!(in.X > static_cast<double>(in.ti.l1)))
    throw DomainError("main term requires X > l1");
  MainTerm mt;
  mt.prefactor = main_term_slope(in.constant_form, in.ti, form, k) * in.X;
  double bracket = std::log(in.X / static_cast<double>(in.ti.l1)) + in.C;
  double env = 0.0;
  for (const auto& pp : in.ti.prime_factors) {
    const double pd = static_cast<double>(pp.p);
    env += std::log(pd) / pd;
    if (pp.e % 2 == 1) {
      const double lam = form.lambda(pp.p);
      bracket += -std::log(pd) + 2.0 * lam * std::log(pd) / (1.0 + lam + 1.0 / pd);
    }
  }
  mt.bracket = bracket;
  mt.predicted = mt.prefactor * bracket;
  mt.envelope = std::abs(mt.prefactor) * in.kappa_D * env;
  return mt;
}

}  // namespace qtwist
