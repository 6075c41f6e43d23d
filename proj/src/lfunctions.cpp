#include "qtwist/lfunctions.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "qtwist/errors.hpp"

namespace qtwist {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUnitTail = 1e-17;

// Neumaier's compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

const CutoffTable& unit_joint_table(int kappa) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<CutoffTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[kappa];
  if (!slot) slot = std::make_unique<CutoffTable>(joint_weight(kappa), Kernel::unit, 1e-16);
  return *slot;
}

double unit_modular_t_max(int kappa) {
  double t = kappa / 2.0;
  while (boost::math::gamma_q(kappa / 2.0, t) > kUnitTail) t += 0.5;
  return t;
}

void check_family_d(std::uint64_t d) {
  if (d == 0 || d % 2 == 0 || !is_squarefree(d))
    throw DomainError("d must be odd, positive and square-free (got " + std::to_string(d) + ")");
}

}  // namespace

double relative_discrepancy(double joint, double product, double floor) {
  return std::abs(joint - product) / std::max(std::abs(product), floor);
}

AfeEngine::AfeEngine(std::shared_ptr<const HeckeForm> form, Kernel kernel,
                     std::size_t joint_sigma_limit)
    : form_(std::move(form)), kernel_(kernel) {
  const std::size_t N = form_->size();
  const auto lam = form_->lambda_table();
  a_.assign(N + 1, 0.0);
  inv_sqrt_.assign(N + 1, 0.0);
  for (std::size_t n = 1; n <= N; ++n) {
    inv_sqrt_[n] = 1.0 / std::sqrt(static_cast<double>(n));
    a_[n] = lam[n] * inv_sqrt_[n];
  }
  if (kernel_ == Kernel::unit) {
    t1_max_ = std::sqrt(-std::log(kUnitTail));
    while (boost::math::gamma_q(0.25, t1_max_ * t1_max_) > kUnitTail) t1_max_ += 0.05;
    t2_max_ = unit_modular_t_max(form_->weight());
  } else {
    // Slow decay: only the quadratic cutoff is tabulated (oracle use).
    v1_table_ = std::make_unique<CutoffTable>(quadratic_weight(), kernel_, 1e-14, 4e-3, 400.0);
    t1_max_ = v1_table_->t_max();
    t2_max_ = 0.0;
  }
  if (joint_sigma_limit > 0) {
    if (kernel_ != Kernel::unit)
      throw DomainError("the joint route is only available with the unit kernel");
    if (joint_sigma_limit > N) throw RangeError("joint sigma table exceeds the coefficient cache");
    const auto sig = sigma_f_table(joint_sigma_limit, *form_);
    b_.assign(joint_sigma_limit + 1, 0.0);
    for (std::size_t n = 1; n <= joint_sigma_limit; ++n) b_[n] = sig[n] * inv_sqrt_[n];
    unit_joint_table(form_->weight());
  }
}

double AfeEngine::t_joint_max() const { return unit_joint_table(form_->weight()).t_max(); }

std::size_t AfeEngine::modular_coefficients_needed(std::uint64_t d_max, Kernel kernel) {
  if (kernel != Kernel::unit)
    throw DomainError("modular central values need the unit kernel");
  return static_cast<std::size_t>(unit_modular_t_max(12) * 8.0 * static_cast<double>(d_max) /
                                  (2.0 * kPi)) + 2;
}

std::size_t AfeEngine::joint_coefficients_needed(std::uint64_t d_max) {
  return static_cast<std::size_t>(unit_joint_table(12).t_max() *
                                  std::pow(static_cast<double>(d_max), 1.5)) + 2;
}

double AfeEngine::V1(double t) const {
  return kernel_ == Kernel::unit ? boost::math::gamma_q(0.25, t * t) : (*v1_table_)(t);
}

double AfeEngine::V2(double t) const {
  return boost::math::gamma_q(form_->weight() / 2.0, t);
}

std::uint64_t AfeEngine::quadratic_terms(std::uint64_t d) const {
  return static_cast<std::uint64_t>(t1_max_ * std::sqrt(8.0 * static_cast<double>(d) / kPi));
}

std::uint64_t AfeEngine::modular_terms(std::uint64_t d) const {
  return static_cast<std::uint64_t>(t2_max_ * 8.0 * static_cast<double>(d) / (2.0 * kPi));
}

std::uint64_t AfeEngine::joint_terms(std::uint64_t d) const {
  return static_cast<std::uint64_t>(t_joint_max() * std::pow(static_cast<double>(d), 1.5));
}

std::uint64_t AfeEngine::joint_d_limit() const {
  if (b_.empty()) return 0;
  std::uint64_t d = 1;
  while (joint_terms(d + 1) < b_.size()) ++d;
  return d;
}

std::uint64_t AfeEngine::modular_d_limit() const {
  if (t2_max_ <= 0) return 0;
  return static_cast<std::uint64_t>((static_cast<double>(a_.size()) - 2.0) * 2.0 * kPi /
                                    (8.0 * t2_max_));
}

double AfeEngine::l_quadratic(const KroneckerTable& chi) const {
  const double scale = std::sqrt(kPi / (8.0 * static_cast<double>(chi.d())));
  const std::uint64_t N = quadratic_terms(chi.d());
  if (N >= inv_sqrt_.size()) throw RangeError("quadratic AFE exceeds the coefficient cache");
  CompensatedSum s;
  for (std::uint64_t n = 1; n <= N; n += 2) {
    const int c = chi(n);
    if (c == 0) continue;
    s.add(c * inv_sqrt_[n] * V1(static_cast<double>(n) * scale));
  }
  return 2.0 * s.value();
}

double AfeEngine::l_modular(const KroneckerTable& chi) const {
  if (kernel_ != Kernel::unit)
    throw DomainError("modular central values need the unit kernel");
  const std::uint64_t q = chi.modulus();
  const double alpha = 2.0 * kPi / static_cast<double>(q);
  const std::uint64_t N = modular_terms(chi.d());
  if (N >= a_.size())
    throw RangeError("modular AFE for d=" + std::to_string(chi.d()) +
                     " exceeds the coefficient cache");
  // Q(k/2, t) = e^{-t} sum_{j < k/2} t^j / j!, with e^{-t} stepped by e^{-2 alpha}
  // and re-seeded exactly every 256 terms.
  const int K = form_->weight() / 2;
  std::vector<double> inv_fact(static_cast<std::size_t>(K));
  inv_fact[0] = 1.0;
  for (int j = 1; j < K; ++j) inv_fact[static_cast<std::size_t>(j)] = inv_fact[static_cast<std::size_t>(j - 1)] / j;
  const double step = std::exp(-2.0 * alpha);
  const auto& table = chi.values();
  CompensatedSum s;
  double e = 0.0;
  std::uint64_t r = 1;
  std::uint64_t count = 0;
  for (std::uint64_t n = 1; n <= N; n += 2, ++count) {
    if (count % 256 == 0)
      e = std::exp(-alpha * static_cast<double>(n));
    else
      e *= step;
    const int c = table[r];
    r += 2;
    if (r >= q) r -= q;
    if (c == 0) continue;
    const double t = alpha * static_cast<double>(n);
    double poly = inv_fact[static_cast<std::size_t>(K - 1)];
    for (int j = K - 2; j >= 0; --j) poly = poly * t + inv_fact[static_cast<std::size_t>(j)];
    s.add(c * a_[n] * e * poly);
  }
  return 2.0 * s.value();
}

double AfeEngine::joint(const KroneckerTable& chi) const {
  if (b_.empty()) throw RangeError("joint route not enabled for this engine");
  const CutoffTable& V = unit_joint_table(form_->weight());
  const double inv_scale = std::pow(static_cast<double>(chi.d()), -1.5);
  const std::uint64_t N = joint_terms(chi.d());
  if (N >= b_.size())
    throw RangeError("joint AFE for d=" + std::to_string(chi.d()) + " exceeds the sigma table");
  CompensatedSum s;
  for (std::uint64_t n = 1; n <= N; n += 2) {
    const int c = chi(n);
    if (c == 0) continue;
    s.add(c * b_[n] * V(static_cast<double>(n) * inv_scale));
  }
  return 2.0 * s.value();
}

double l_quadratic_central(std::uint64_t d, const AfeEngine& engine) {
  check_family_d(d);
  return engine.l_quadratic(KroneckerTable(d));
}

double l_modular_central(std::uint64_t d, const AfeEngine& engine) {
  check_family_d(d);
  return engine.l_modular(KroneckerTable(d));
}

const char* route_name(AfeRoute r) { return r == AfeRoute::product ? "product" : "joint"; }

AfeRoute parse_route(const std::string& s) {
  if (s == "product") return AfeRoute::product;
  if (s == "joint") return AfeRoute::joint;
  throw DomainError("unknown AFE route '" + s + "' (expected product or joint)");
}

double joint_product_afe(std::uint64_t d, const AfeEngine& engine, AfeRoute route) {
  check_family_d(d);
  const KroneckerTable chi(d);
  if (route == AfeRoute::joint) return engine.joint(chi);
  return engine.l_quadratic(chi) * engine.l_modular(chi);
}

std::uint64_t route_terms(std::uint64_t d, const AfeEngine& engine, AfeRoute route) {
  if (route == AfeRoute::joint) return engine.joint_terms(d);
  return engine.quadratic_terms(d) / 2 + engine.modular_terms(d) / 2;
}

LValueRecord lvalue_record(std::uint64_t d, const AfeEngine& engine) {
  check_family_d(d);
  const KroneckerTable chi(d);
  LValueRecord r;
  r.d = d;
  r.L_chi = engine.l_quadratic(chi);
  r.L_fchi = engine.l_modular(chi);
  r.joint = engine.joint(chi);
  r.rel_discrepancy = relative_discrepancy(r.joint, r.L_chi * r.L_fchi);
  r.terms_used = engine.joint_terms(d);
  return r;
}

std::vector<LValueRecord> afe_cross_check(std::uint64_t d_max, const AfeEngine& engine) {
  std::vector<LValueRecord> out;
  for (std::uint64_t d = 1; d <= d_max; d += 2)
    if (is_squarefree(d)) out.push_back(lvalue_record(d, engine));
  return out;
}

namespace {

// log gamma(s) for gamma(s) = e^{s log_scale} prod Gamma(shift + scale s), unnormalised.
cplx log_gamma_factor(const GammaWeight& g, cplx s) {
  cplx r = s * g.log_scale;
  for (const auto& f : g.factors) r += log_gamma_complex(f.shift + f.scale * s);
  return r;
}

// (1/2 pi i) int_{(c)} gamma(z + u) n^{-z-u} du / u divided by gamma(s0), with
// the abscissa chosen per n to minimise the integrand on the real axis.
double afe_piece(const GammaWeight& g, double z, double log_gamma_s0, double n) {
  const double log_n = std::log(n);
  double best = std::numeric_limits<double>::infinity();
  double c = 0.0;
  for (double cand : {0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0}) {
    if (z + cand <= 1.0) continue;
    bool clear = true;
    for (const auto& f : g.factors) clear = clear && f.shift + f.scale * (z + cand) > 0.25;
    if (!clear) continue;
    const double mag =
        log_gamma_factor(g, cplx(z + cand, 0.0)).real() - (z + cand) * log_n - std::log(cand);
    if (mag < best) {
      best = mag;
      c = cand;
    }
  }
  if (c == 0.0) throw DomainError("self-dual AFE: no admissible contour");
  auto F = [&](double y) {
    const cplx u(c, y);
    return std::exp(log_gamma_factor(g, z + u) - log_gamma_s0 - (z + u) * log_n) / u;
  };
  constexpr double h = 0.02;
  double sum = 0.5 * F(0.0).real();
  const double peak = std::abs(F(0.0));
  for (int j = 1; j < 200000; ++j) {
    const cplx v = F(j * h);
    sum += v.real();
    if (std::abs(v) < 1e-24 * peak) break;
  }
  return sum * h / kPi;
}

}  // namespace

double self_dual_value(const std::function<double(std::uint64_t)>& coeff,
                       const GammaWeight& gamma, double s0, std::uint64_t n_cap) {
  const double z1 = s0, z2 = 1.0 - s0;
  const double lg0 = log_gamma_factor(gamma, cplx(s0, 0.0)).real();
  CompensatedSum s;
  int small_run = 0;
  for (std::uint64_t n = 1; n <= n_cap; ++n) {
    const double nn = static_cast<double>(n);
    const double t1 = afe_piece(gamma, z1, lg0, nn);
    const double t2 = afe_piece(gamma, z2, lg0, nn);
    s.add(coeff(n) * (t1 + t2));
    small_run = (std::abs(t1) + std::abs(t2) < 1e-18 * std::abs(s.value())) ? small_run + 1 : 0;
    if (small_run >= 3) return s.value();
  }
  throw RangeError("self-dual AFE did not converge within the coefficient cap");
}

}  // namespace qtwist
