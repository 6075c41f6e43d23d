#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace qtwist {

using cplx = std::complex<double>;

/// log Gamma(s) on the principal branch continued along the real axis;
/// Stirling series after upward recurrence.  Throws PoleError within 1e-8 of
/// a non-positive integer.
cplx log_gamma_complex(cplx s);
cplx gamma_complex(cplx s);

/// Even entire cutoff multiplier W(s) with W(0) = 1.
enum class Kernel {
  unit,      // W(s) = 1
  gaussian,  // W(s) = exp(s^2)
};

cplx kernel_value(Kernel k, cplx s);
const char* kernel_name(Kernel k);
Kernel parse_kernel(const std::string& name);

/// prod_i Gamma(a_i + b_i s) / Gamma(a_i) * exp(s * log_scale).
struct GammaWeight {
  struct Factor {
    double shift;
    double scale;
  };
  std::vector<Factor> factors;
  double log_scale = 0.0;

  cplx operator()(cplx s) const;
  /// Largest real pole (the line of integration must stay to its right
  /// when shifted left of zero).
  double rightmost_pole() const;
};

/// Weight of the joint product: Gamma(1/4+s/2)Gamma(k/2+s)/(Gamma(1/4)Gamma(k/2))
/// times (8/2pi)^s (8/pi)^{s/2}.
GammaWeight joint_weight(int kappa);
/// Gamma(1/4+s/2)/Gamma(1/4), the weight of the quadratic Dirichlet L-function.
GammaWeight quadratic_weight();
/// Gamma(k/2+s)/Gamma(k/2), the weight of the twisted modular L-function.
GammaWeight modular_weight(int kappa);

cplx w_factor(cplx s, int kappa);

/// Vertical line Re s = c, truncated at |Im s| <= T, trapezoid step h.
/// T <= 0 selects the height adaptively from the integrand decay.
struct ContourSpec {
  double c = 2.0;
  double T = 0.0;
  double h = 1e-2;
  double A = 16.0;
};

/// V(t) = (1/2 pi i) int_(c) W(s) w(s) t^{-s} ds / s.  A line with c < 0
/// (right of every other pole) picks up the residue W(0) w(0) = 1.
double cutoff_contour(double t, const GammaWeight& w, Kernel kernel,
                      const ContourSpec& spec = {});

/// The joint cutoff V(t) = cutoff_contour(t, joint_weight(kappa), kernel, spec).
double V_weight(double t, const ContourSpec& spec, int kappa,
                Kernel kernel = Kernel::unit);

/// Closed forms for W = 1: Q(1/4, t^2) and Q(k/2, t) (regularised upper
/// incomplete gamma).
double cutoff_quadratic_unit(double t);
double cutoff_modular_unit(double t, int kappa);

/// V tabulated on a uniform grid in sqrt(t) with local Lagrange
/// interpolation; V(t) is analytic in sqrt(t).  Beyond t_max the table
/// returns zero, where t_max is the first grid point past which |V| stays
/// below `tail`.
class CutoffTable {
 public:
  CutoffTable(GammaWeight w, Kernel kernel, double tail = 1e-16,
              double x_step = 4e-3, double x_cap = 40.0);

  double operator()(double t) const;
  double t_max() const { return t_max_; }
  Kernel kernel() const { return kernel_; }

 private:
  Kernel kernel_;
  double step_;
  double t_max_;
  std::vector<double> values_;  // V((i*step)^2); entry 0 is the t -> 0 limit
};

/// Smooth bump exp(-1/((x-1)(2-x))) on (1,2).
double phi(double x);
/// Mellin transform int_1^2 phi(x) x^{s-1} dx.
cplx phi_hat(cplx s);

/// int_1^2 (cos + sin)(2 pi xi x) F(x) dx with panels scaled to |xi|.
/// Throws QuadratureError if more than max_panels panels would be needed.
double cos_sin_transform(const std::function<double(double)>& F, double xi,
                         int max_panels = 100000);

/// phi_tilde_n(y) = int (cos+sin)(2 pi x y) phi(x) V(n/(X x)^{3/2}) dx.
double phi_tilde(double y, double n, double X, const std::function<double(double)>& V);

/// The y = 0 value by the Mellin route:
/// (1/2 pi i) int W(s) w(s) (n / X^{3/2})^{-s} phi_hat(1 + 3s/2) ds / s.
double phi_tilde_zero_mellin(double n, double X, int kappa, Kernel kernel,
                             const ContourSpec& spec = {});

}  // namespace qtwist
