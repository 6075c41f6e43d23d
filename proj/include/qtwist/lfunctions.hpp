#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qtwist/characters.hpp"
#include "qtwist/hecke.hpp"
#include "qtwist/special.hpp"

namespace qtwist {

struct LValueRecord {
  std::uint64_t d = 0;
  double L_chi = 0.0;
  double L_fchi = 0.0;
  double joint = 0.0;
  double rel_discrepancy = 0.0;
  std::uint64_t terms_used = 0;
};

inline constexpr double kDiscrepancyFloor = 1e-3;

/// |joint - L_chi L_fchi| / max(|L_chi L_fchi|, floor).
double relative_discrepancy(double joint, double product, double floor = kDiscrepancyFloor);

/// Coefficient tables and cutoff functions shared by every central-value
/// evaluation.  Immutable after construction.
class AfeEngine {
 public:
  /// `joint_sigma_limit` sizes the sigma_f table for the joint route (0
  /// disables it).
  AfeEngine(std::shared_ptr<const HeckeForm> form, Kernel kernel,
            std::size_t joint_sigma_limit = 0);

  const HeckeForm& form() const { return *form_; }
  Kernel kernel() const { return kernel_; }

  /// L(1/2, chi_8d) = 2 sum chi_8d(n) n^{-1/2} V1(n sqrt(pi/(8d))).
  double l_quadratic(const KroneckerTable& chi) const;
  /// L(1/2, f x chi_8d) = 2 sum lambda(n) chi_8d(n) n^{-1/2} V2(2 pi n/(8d)).
  double l_modular(const KroneckerTable& chi) const;
  /// 2 sum sigma_f(n) chi_8d(n) n^{-1/2} V(n / d^{3/2}).
  double joint(const KroneckerTable& chi) const;

  /// Terms summed by each route for this d (deterministic work measure).
  std::uint64_t quadratic_terms(std::uint64_t d) const;
  std::uint64_t modular_terms(std::uint64_t d) const;
  std::uint64_t joint_terms(std::uint64_t d) const;

  /// Largest d whose joint sum fits in the sigma table.
  std::uint64_t joint_d_limit() const;
  /// Largest d whose modular sum fits in the lambda cache.
  std::uint64_t modular_d_limit() const;

  double t1_max() const { return t1_max_; }
  double t2_max() const { return t2_max_; }
  double t_joint_max() const;

  /// Cutoff limits expressed as the number of coefficients needed.
  static std::size_t modular_coefficients_needed(std::uint64_t d_max, Kernel kernel);
  static std::size_t joint_coefficients_needed(std::uint64_t d_max);

 private:
  double V1(double t) const;
  double V2(double t) const;

  std::shared_ptr<const HeckeForm> form_;
  Kernel kernel_;
  std::vector<double> a_;      // lambda(n)/sqrt(n)
  std::vector<double> b_;      // sigma_f(n)/sqrt(n)
  std::vector<double> inv_sqrt_;
  std::unique_ptr<CutoffTable> v1_table_;
  double t1_max_;
  double t2_max_;
};

/// Quadratic AFE value.  Throws DomainError unless d is odd, positive and
/// square-free.
double l_quadratic_central(std::uint64_t d, const AfeEngine& engine);
double l_modular_central(std::uint64_t d, const AfeEngine& engine);
enum class AfeRoute { product, joint };
const char* route_name(AfeRoute r);
AfeRoute parse_route(const std::string& s);

/// L(1/2, chi_8d) L(1/2, f x chi_8d), either as the product of the two
/// individual sums or from the joint sum.
double joint_product_afe(std::uint64_t d, const AfeEngine& engine,
                         AfeRoute route = AfeRoute::product);
/// Terms summed by `route` for this d.
std::uint64_t route_terms(std::uint64_t d, const AfeEngine& engine, AfeRoute route);

LValueRecord lvalue_record(std::uint64_t d, const AfeEngine& engine);

/// Records for every odd square-free d <= d_max.
std::vector<LValueRecord> afe_cross_check(std::uint64_t d_max, const AfeEngine& engine);

/// Value at s0 of a self-dual L-function with root number +1 and completed
/// form gamma(s) L(s) = gamma(1-s) L(1-s), from the smoothed approximate
/// functional equation with W = 1.  `coeff(n)` supplies the Dirichlet
/// coefficients; summation stops once three consecutive terms fall below
/// 1e-18 of the running value.
double self_dual_value(const std::function<double(std::uint64_t)>& coeff,
                       const GammaWeight& gamma, double s0, std::uint64_t n_cap = 400);

}  // namespace qtwist
