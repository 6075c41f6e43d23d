#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtwist/characters.hpp"
#include "qtwist/hecke.hpp"

namespace qtwist {

struct EulerProdSpec {
  std::uint64_t P = 100000;     // products run over odd primes p <= P
  double tail_constant = 1.0;   // half-width = tail_constant * sum_{p > P} 3/p^2
};

/// A truncated product with its tail half-width.
struct Estimate {
  double value = 0.0;
  double tail = 0.0;
};

/// Series-versus-closed-form evaluation of one identity.
struct DualResult {
  double series = 0.0;
  double closed = 0.0;
  double residual = 0.0;  // |series - closed| / max(|closed|, 1e-300)
};

/// tail_constant * sum_{p > P} 3/p^2, estimated by 3/(P log P).
double prime_tail_envelope(const EulerProdSpec& spec);

/// L_p(s, sym^2 f)^{-1} = (1 - x)(1 - (lambda^2 - 2) x + x^2), x = p^{-s}.
double sym2_local_inverse(double lambda_p, double x);

/// sum_h sigma_f(p^{2h}) y^h and sum_h sigma_f(p^{2h+1}) y^h in closed form.
double even_square_series(double lambda_p, double y);
double odd_square_series(double lambda_p, double y);

double H_p(double s, std::uint64_t p, const HeckeForm& form);

/// Local correction at p | l (1 if p does not divide l).  Throws
/// SingularFactorError if H_p(s) vanishes.
double Q_p_factor(double s, std::uint64_t p, const TwistIndex& ti, const HeckeForm& form);
double Q_product(double s, const TwistIndex& ti, const HeckeForm& form);

/// prod_{p odd, p <= P} (1 - p^{-s})(1 - lambda(p) p^{-s} + p^{-2s}) H_p(s), s > 1/2.
Estimate H_script(double s, const HeckeForm& form, const EulerProdSpec& spec);

/// L(s, f) and L(s, sym^2 f) at real s from their functional equations.
double l_modular_at(double s, const HeckeForm& form);
double l_sym2_at(double s, const HeckeForm& form);

struct ReferenceValues {
  double zeta2 = 0.0;
  double zeta2_odd = 0.0;     // zeta^{(2)}(2)
  double L1f = 0.0;           // L^{(2)}(1, f)
  double L1sym2 = 0.0;        // L^{(2)}(1, sym^2 f)
  Estimate L1f_euler;         // truncated Euler products, for comparison
  Estimate L1sym2_euler;
};

ReferenceValues reference_values(const HeckeForm& form, const EulerProdSpec& spec);

/// Truncated Dirichlet series of Z(s, l) over odd m <= M against its Euler
/// product expression.
DualResult Z_dual(double s, const TwistIndex& ti, std::uint64_t M, const HeckeForm& form,
                  const EulerProdSpec& spec);

enum class LocalBranch { even, odd, generic };
const char* branch_name(LocalBranch b);

/// Truncated h-series (h <= 60) against the closed forms built from the
/// Satake parameters.
DualResult local_series_identity(std::uint64_t p, double s, LocalBranch branch,
                                 const HeckeForm& form);

struct JParams {
  std::uint64_t p = 3;
  double v = 2.0;
  double w = 1.5;
  int iota = 1;
  std::int64_t k1 = 1;          // odd square-free
  int l_p = 0;                  // exponent of p in l
  bool p_divides_2a = false;
};

/// Local factor J_{iota k1, p}(v, w): double series over n, k2 <= 60 with
/// exact Gauss sums against the closed form.  Requires v >= 1.1, w >= 0.1.
DualResult J_local_dual(const JParams& jp, const HeckeForm& form);

/// (1 - p^{-v}) J_{iota k1, p}(v, w), finite at v = 0; the k2 geometric sum
/// is resolved on the series side.
DualResult J_resolved_dual(const JParams& jp, const HeckeForm& form);

/// K_{1,p}(v, 1/2) by its series (h, k2 <= 60) and in closed form.
DualResult K1_p(double v, std::uint64_t p, const HeckeForm& form);

/// I_{1,p}(v, 1/2); for p | a (not dividing l) the J factor is trivial.
double I1_p(double v, std::uint64_t p, int l_p, const HeckeForm& form);

/// F^gen_p(v) from its defining series.
double F_gen_p(double v, std::uint64_t p, const HeckeForm& form);

/// E_p(v, 1/2) as the direct ratio K_p I_p / F^gen_p against the closed
/// branch formula.
DualResult E_p_dual(double v, std::uint64_t p, int l_p, const HeckeForm& form);

struct KEFSuite {
  struct PrimeRow {
    std::uint64_t p;
    int l_p;
    DualResult K1;
    DualResult E;
  };
  std::vector<PrimeRow> rows;
  double F_series = 0.0;
  double F_closed = 0.0;
  double residual = 0.0;
  double a_tail = 0.0;      // |partial sum over a in (A, 2A]|, tail indicator
  std::uint64_t a_max = 0;
};

/// K_{1,p} and E_p at the primes dividing l (and p = 3, 5, 7), and F(0; l)
/// from the truncated a-sum against the closed Euler product.
KEFSuite K1_E_F_suite(const TwistIndex& ti, double v, const HeckeForm& form,
                      const EulerProdSpec& spec, std::uint64_t a_max = 10000);

enum class ConstantForm { theorem_form, proof_form };
const char* constant_form_name(ConstantForm f);
ConstantForm parse_constant_form(const std::string& s);

/// l-independent constants of the main term.
struct MainTermConstants {
  double phi_hat_1 = 0.0;
  double H1 = 0.0;
  double zeta2 = 0.0;
  double zeta2_odd = 0.0;
  double L1f = 0.0;       // L^{(2)}(1, f)
  double L1sym2 = 0.0;    // L^{(2)}(1, sym^2 f)
};

MainTermConstants main_term_constants(const HeckeForm& form, const EulerProdSpec& spec);

struct MainTermInputs {
  TwistIndex ti;
  double X = 0.0;
  double C = 0.0;
  double kappa_D = 2.0;
  ConstantForm constant_form = ConstantForm::proof_form;
};

struct MainTerm {
  double predicted = 0.0;
  double envelope = 0.0;
  double prefactor = 0.0;  // coefficient of the bracket
  double bracket = 0.0;
};

/// Prefactor divided by X (the slope A in S / X = A (log X + C) for l = 1).
double main_term_slope(ConstantForm f, const TwistIndex& ti, const HeckeForm& form,
                       const MainTermConstants& k);

/// Throws ConditionError naming the prime if 1 + lambda(p) + 1/p vanishes
/// for some p | l1, DomainError if X <= l1.
MainTerm main_term(const MainTermInputs& in, const HeckeForm& form, const MainTermConstants& k);

}  // namespace qtwist
