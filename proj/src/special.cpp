#include "qtwist/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "qtwist/errors.hpp"

namespace qtwist {

namespace {

constexpr double kPi = std::numbers::pi;

// B_{2k} / (2k (2k-1)) for k = 1..10.
constexpr std::array<double, 10> kStirling = {
    1.0 / 12.0,        -1.0 / 360.0,          1.0 / 1260.0,        -1.0 / 1680.0,
    1.0 / 1188.0,      -691.0 / 360360.0,     1.0 / 156.0,         -3617.0 / 122400.0,
    43867.0 / 244188.0, -174611.0 / 125400.0};

}  // namespace

cplx log_gamma_complex(cplx s) {
  const double nearest = std::round(s.real());
  if (nearest <= 0 && std::abs(s - cplx(nearest, 0.0)) < 1e-8)
    throw PoleError("Gamma has a pole near s = " + std::to_string(nearest));
  cplx shift = 0.0;
  cplx z = s;
  while (z.real() < 15.0) {
    shift += std::log(z);
    z += 1.0;
  }
  const cplx zinv = 1.0 / z;
  const cplx zinv2 = zinv * zinv;
  cplx series = 0.0;
  cplx pw = zinv;
  for (double c : kStirling) {
    series += c * pw;
    pw *= zinv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift;
}

cplx gamma_complex(cplx s) { return std::exp(log_gamma_complex(s)); }

cplx kernel_value(Kernel k, cplx s) {
  switch (k) {
    case Kernel::unit:
      return 1.0;
    case Kernel::gaussian:
      return std::exp(s * s);
  }
  return 1.0;
}

const char* kernel_name(Kernel k) {
  return k == Kernel::unit ? "unit" : "gaussian";
}

Kernel parse_kernel(const std::string& name) {
  if (name == "unit") return Kernel::unit;
  if (name == "gaussian") return Kernel::gaussian;
  throw UsageError("unknown kernel '" + name + "' (expected unit or gaussian)");
}

cplx GammaWeight::operator()(cplx s) const {
  cplx lg = s * log_scale;
  for (const auto& f : factors)
    lg += log_gamma_complex(f.shift + f.scale * s) - std::lgamma(f.shift);
  return std::exp(lg);
}

double GammaWeight::rightmost_pole() const {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& f : factors) r = std::max(r, -f.shift / f.scale);
  return r;
}

GammaWeight joint_weight(int kappa) {
  return {{{0.25, 0.5}, {kappa / 2.0, 1.0}},
          std::log(8.0 / (2.0 * kPi)) + 0.5 * std::log(8.0 / kPi)};
}

GammaWeight quadratic_weight() { return {{{0.25, 0.5}}, 0.0}; }

GammaWeight modular_weight(int kappa) { return {{{kappa / 2.0, 1.0}}, 0.0}; }

cplx w_factor(cplx s, int kappa) { return joint_weight(kappa)(s); }

namespace {

// Nodes y_j = j h (j >= 0) of the integrand W(s) w(s) / s on Re s = c.
struct LineData {
  double c;
  double h;
  std::vector<cplx> g;  // W w / s at s = c + i j h
};

LineData build_line(const GammaWeight& w, Kernel kernel, double c, double h, double T) {
  if (c <= w.rightmost_pole() || c == 0.0)
    throw DomainError("contour abscissa must avoid the poles of the integrand");
  LineData line{c, h, {}};
  double peak = 0.0;
  constexpr double kYCap = 2000.0;
  for (std::size_t j = 0;; ++j) {
    const double y = static_cast<double>(j) * h;
    if (T > 0 && y > T) break;
    const cplx s(c, y);
    const cplx v = kernel_value(kernel, s) * w(s) / s;
    line.g.push_back(v);
    peak = std::max(peak, std::abs(v));
    if (T <= 0 && y > 1.0 && std::abs(v) < 1e-19 * peak) break;
    if (y > kYCap) throw QuadratureError("vertical-line integrand does not decay");
  }
  return line;
}

// (1/2pi) int f(y) t^{-s} dy by the trapezoid rule with step `stride * h`.
// Returns the full complex sum over both half-lines.
cplx line_sum(const LineData& line, double t, std::size_t stride) {
  const double L = std::log(t);
  const double mag = std::exp(-line.c * L);
  cplx sum = 0.0;
  for (std::size_t j = stride; j < line.g.size(); j += stride) {
    const double y = static_cast<double>(j) * line.h;
    const cplx e = std::polar(mag, -y * L);
    // s and its conjugate: W w / s is real on the real axis.
    sum += line.g[j] * e + std::conj(line.g[j]) * std::conj(e);
  }
  sum += line.g[0] * mag;
  return sum * (static_cast<double>(stride) * line.h / (2.0 * kPi));
}

}  // namespace

double cutoff_contour(double t, const GammaWeight& w, Kernel kernel, const ContourSpec& spec) {
  if (!(t > 0)) throw DomainError("cutoff weight needs t > 0");
  const LineData line = build_line(w, kernel, spec.c, spec.h, spec.T);
  const cplx fine = line_sum(line, t, 1);
  const cplx coarse = line_sum(line, t, 2);
  const double residue = spec.c < 0 ? 1.0 : 0.0;
  if (std::abs(fine.imag()) > 1e-9)
    throw QuadratureError("cutoff weight has imaginary residue " + std::to_string(fine.imag()));
  if (std::abs(fine - coarse) > 1e-9 * std::max(1.0, std::abs(fine)))
    throw QuadratureError("cutoff weight fails the step-halving check");
  return residue + fine.real();
}

double V_weight(double t, const ContourSpec& spec, int kappa, Kernel kernel) {
  return cutoff_contour(t, joint_weight(kappa), kernel, spec);
}

double cutoff_quadratic_unit(double t) {
  if (!(t > 0)) throw DomainError("cutoff weight needs t > 0");
  return boost::math::gamma_q(0.25, t * t);
}

double cutoff_modular_unit(double t, int kappa) {
  if (!(t > 0)) throw DomainError("cutoff weight needs t > 0");
  return boost::math::gamma_q(kappa / 2.0, t);
}

CutoffTable::CutoffTable(GammaWeight w, Kernel kernel, double tail, double x_step,
                         double x_cap)
    : kernel_(kernel), step_(x_step) {
  constexpr double kH = 1e-2;
  const LineData left = build_line(w, kernel, -0.25, kH, 0.0);
  std::vector<LineData> right;
  for (double c : {1.0, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0})
    right.push_back(build_line(w, kernel, c, kH, 0.0));

  values_.push_back(1.0);
  t_max_ = x_cap * x_cap;
  const auto n_cap = static_cast<std::size_t>(x_cap / x_step);
  for (std::size_t i = 1; i <= n_cap; ++i) {
    const double x = static_cast<double>(i) * x_step;
    const double t = x * x;
    double v;
    if (t < 0.5) {
      v = 1.0 + line_sum(left, t, 1).real();
    } else {
      // Line whose real-axis integrand t^{-c} |W w / s| is smallest.
      const LineData* best = &right.front();
      double best_mag = std::numeric_limits<double>::infinity();
      for (const auto& line : right) {
        const double mag = std::log(std::abs(line.g[0])) - line.c * std::log(t);
        if (mag < best_mag) {
          best_mag = mag;
          best = &line;
        }
      }
      v = line_sum(*best, t, 1).real();
    }
    values_.push_back(v);
    if (t > 1.0 && std::abs(v) < tail) {
      t_max_ = t;
      break;
    }
  }
}

double CutoffTable::operator()(double t) const {
  if (t >= t_max_) return 0.0;
  if (!(t >= 0)) throw DomainError("cutoff weight needs t >= 0");
  const double u = std::sqrt(t) / step_;
  const auto n = static_cast<std::ptrdiff_t>(values_.size());
  auto i0 = static_cast<std::ptrdiff_t>(std::floor(u)) - 2;
  i0 = std::clamp<std::ptrdiff_t>(i0, 0, n - 6);
  double result = 0.0;
  for (std::ptrdiff_t a = 0; a < 6; ++a) {
    double basis = 1.0;
    for (std::ptrdiff_t b = 0; b < 6; ++b) {
      if (b == a) continue;
      basis *= (u - static_cast<double>(i0 + b)) / static_cast<double>(a - b);
    }
    result += basis * values_[static_cast<std::size_t>(i0 + a)];
  }
  return result;
}

double phi(double x) {
  if (x <= 1.0 || x >= 2.0) return 0.0;
  return std::exp(-1.0 / ((x - 1.0) * (2.0 - x)));
}

cplx phi_hat(cplx s) {
  auto f = [s](double x) -> cplx {
    const double p = phi(x);
    return p == 0.0 ? cplx(0.0) : p * std::exp((s - 1.0) * std::log(x));
  };
  // Fixed GK61 panels: at least 32, and two per oscillation of x^{i Im s}.
  const int panels =
      std::max(32, static_cast<int>(std::ceil(std::abs(s.imag()) * std::log(2.0) / kPi)));
  cplx total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = 1.0 + static_cast<double>(k) / panels;
    const double b = 1.0 + static_cast<double>(k + 1) / panels;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 0);
  }
  return total;
}

double cos_sin_transform(const std::function<double(double)>& F, double xi, int max_panels) {
  // Fixed GK61 panels: at least 32, and two per oscillation.
  const double need = std::max(32.0, std::ceil(2.0 * std::abs(xi)));
  if (need > max_panels)
    throw QuadratureError("cos+sin transform needs more than " + std::to_string(max_panels) +
                          " panels");
  const int panels = std::max(1, static_cast<int>(need));
  auto f = [&](double x) {
    const double v = F(x);
    if (v == 0.0) return 0.0;
    const double a = 2.0 * kPi * xi * x;
    return (std::cos(a) + std::sin(a)) * v;
  };
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = 1.0 + static_cast<double>(k) / panels;
    const double b = 1.0 + static_cast<double>(k + 1) / panels;
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 0);
  }
  return total;
}

double phi_tilde(double y, double n, double X, const std::function<double(double)>& V) {
  if (!(X > 0) || !(n >= 1)) throw DomainError("phi_tilde needs X > 0 and n >= 1");
  return cos_sin_transform(
      [&](double x) {
        const double p = phi(x);
        return p == 0.0 ? 0.0 : p * V(n / std::pow(X * x, 1.5));
      },
      y);
}

double phi_tilde_zero_mellin(double n, double X, int kappa, Kernel kernel,
                             const ContourSpec& spec) {
  const GammaWeight w = joint_weight(kappa);
  const double logr = std::log(std::pow(X, 1.5) / n);
  auto integrand = [&](double y) {
    const cplx s(spec.c, y);
    return kernel_value(kernel, s) * w(s) * std::exp(s * logr) * phi_hat(1.0 + 1.5 * s) / s;
  };
  const double h = spec.h;
  double peak = 0.0;
  cplx sum = integrand(0.0);
  for (std::size_t j = 1;; ++j) {
    const double y = static_cast<double>(j) * h;
    const cplx v = integrand(y);
    sum += 2.0 * cplx(v.real(), 0.0);
    peak = std::max(peak, std::abs(v));
    if (y > 1.0 && std::abs(v) < 1e-18 * peak) break;
    if (y > 2000.0) throw QuadratureError("phi_tilde Mellin integrand does not decay");
  }
  double v = sum.real() * h / (2.0 * kPi);
  if (spec.c < 0) v += phi_hat(1.0).real();
  return v;
}

}  // namespace qtwist
