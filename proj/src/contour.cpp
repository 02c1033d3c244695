#include "kpz/contour.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <cmath>
#include <numbers>
#include <limits>
#include <string>

#include "kpz/error.hpp"
#include "kpz/log.hpp"

namespace kpz {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMinAcceptNodes = 64;

double lgamma_int(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

}  // namespace

QuadResult circle_integral(const std::function<cplx(cplx)>& f, const Contour& c, double tol,
                           std::span<const cplx> poles) {
  if (!(c.radius > 0.0)) throw Error(ErrorKind::DomainError, "contour radius must be positive");
  if (!(tol > 0.0)) throw Error(ErrorKind::DomainError, "tolerance must be positive");
  for (const cplx& pole : poles) {
    if (std::abs(std::abs(pole - c.center) - c.radius) < 1e-6 * c.radius)
      throw Error(ErrorKind::PoleOnContour,
                  "pole at (" + std::to_string(pole.real()) + "," + std::to_string(pole.imag()) +
                      ") lies on the contour");
  }
  int n = std::max(8, c.node_count);
  // sum over nodes of f(z_k)(z_k - c); value = sum / n
  auto node_term = [&](int k, int total) {
    const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(total);
    const cplx offset = std::polar(c.radius, theta);
    return f(c.center + offset) * offset;
  };
  cplx sum{0.0, 0.0};
  double peak = 0.0;  // largest |term|, sets the roundoff floor of the sum
  auto add = [&](cplx term) {
    peak = std::max(peak, std::abs(term));
    sum += term;
  };
  for (int k = 0; k < n; ++k) add(node_term(k, n));
  cplx value = sum / static_cast<double>(n);
  double est = std::numeric_limits<double>::infinity();
  while (true) {
    const int m = 2 * n;
    for (int k = 1; k < m; k += 2) add(node_term(k, m));
    const cplx next = sum / static_cast<double>(m);
    est = std::abs(next - value);
    value = next;
    n = m;
    if (!std::isfinite(est)) throw Error(ErrorKind::NonConvergent, "non-finite integrand value");
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * peak;
    if (n >= kMinAcceptNodes && est < std::max(tol * std::max(1.0, std::abs(value)), floor)) break;
    if (n >= kMaxQuadNodes)
      throw Error(ErrorKind::NonConvergent,
                  "trapezoid rule did not converge (est " + std::to_string(est) + ", value " + std::to_string(std::abs(value)) + ", radius " + std::to_string(c.radius) + ")");
  }
  return {value, est, n};
}

double bessel_series(BesselKind kind, int n, double arg) {
  double sign = 1.0;
  if (n < 0) {
    n = -n;
    if (kind == BesselKind::J && (n % 2 == 1)) sign = -1.0;
  }
  if (arg == 0.0) return n == 0 ? 1.0 : 0.0;
  const double half = arg / 2.0;
  const double h2 = half * half;
  // first term (x/2)^n / n!, in logs to avoid overflow at high order
  const double log_first = n * std::log(std::abs(half)) - lgamma_int(n);
  double term = std::exp(log_first);
  if (half < 0.0 && (n % 2 == 1)) term = -term;
  double total = term;
  const double alt = kind == BesselKind::J ? -1.0 : 1.0;
  for (int m = 1; m < 500; ++m) {
    term *= alt * h2 / (static_cast<double>(m) * static_cast<double>(m + n));
    total += term;
    if (std::abs(term) <= 1e-18 * std::abs(total) && m > half) break;
  }
  return sign * total;
}

namespace {

// radius minimizing the integrand bound for order n ≥ 0 at parameter t > 0
double bessel_radius(BesselKind kind, int n, double t) {
  const double dn = static_cast<double>(n);
  if (kind == BesselKind::J) {
    if (dn <= 2.0 * t) return 1.0;
    return (dn + std::sqrt(dn * dn - 4.0 * t * t)) / (2.0 * t);
  }
  return (dn + std::sqrt(dn * dn + 4.0 * t * t)) / (2.0 * t);
}

// (1/2πi)∮ dz/z e^{A z + C/z} z^{-n} on the circle of the given radius
double exp_laurent_integral(double A, double C, int n, double radius) {
  auto f = [=](cplx z) { return std::exp(A * z + C / z - static_cast<double>(n + 1) * std::log(z)); };
  const QuadResult r = circle_integral(f, Contour{0.0, radius, 32});
  return r.value.real();
}

double bessel_contour(BesselKind kind, int n, double arg) {
  // symmetry to nonnegative order and argument
  double sign = 1.0;
  if (n < 0) {
    n = -n;
    if (kind == BesselKind::J && (n % 2 == 1)) sign = -sign;
  }
  if (arg < 0.0) {
    arg = -arg;
    if (n % 2 == 1) sign = -sign;
  }
  const double t = arg / 2.0;
  const double radius = bessel_radius(kind, n, t);
  const double C = kind == BesselKind::J ? -t : t;
  return sign * exp_laurent_integral(t, C, n, radius);
}

}  // namespace

double bessel(BesselKind kind, int n, double arg) {
  if (arg == 0.0) return n == 0 ? 1.0 : 0.0;
  const int order = std::abs(n);
  if (order > 40 && std::abs(arg) < order) return bessel_series(kind, n, arg);
  const double contour = bessel_contour(kind, n, arg);
  // the series is only trustworthy where its terms do not cancel heavily
  if (std::abs(arg) <= 12.0) {
    const double series = bessel_series(kind, n, arg);
    if (std::abs(series - contour) > 1e-8 * std::max(1.0, std::abs(series))) {
      log_warning("bessel contour/series mismatch at order " + std::to_string(n) + ", arg " +
                  std::to_string(arg) + "; using series");
      return series;
    }
  }
  return contour;
}

double drifted_bessel_closed_form(BesselKind kind, int n, double a, double b) {
  // exponent A z + C/z with A = a+b, C = a-b; B = |C| up to the sign making A·B ≥ 0
  const double A = a + b;
  const double B = kind == BesselKind::J ? b - a : a - b;
  if (kind == BesselKind::J && b * b < a * a)
    throw Error(ErrorKind::DomainError, "drifted J requires b^2 >= a^2");
  if (kind == BesselKind::I && a * a < b * b)
    throw Error(ErrorKind::DomainError, "drifted I requires a^2 >= b^2");
  const double C = a - b;
  if (A == 0.0 && C == 0.0) return n == 0 ? 1.0 : 0.0;
  if (C == 0.0) {
    // e^{A z}: coefficient of z^n
    if (n < 0) return 0.0;
    return std::pow(A, n) / std::exp(lgamma_int(n));
  }
  if (A == 0.0) {
    // e^{C/z}: coefficient of z^{-|n|}
    if (n > 0) return 0.0;
    return std::pow(C, -n) / std::exp(lgamma_int(-n));
  }
  const double ratio = A / B;  // positive inside the domain
  const double sgn = A > 0.0 ? 1.0 : -1.0;
  const double order_sign = (n % 2 != 0 && sgn < 0.0) ? -1.0 : 1.0;
  const double arg = 2.0 * std::sqrt(A * B);
  return order_sign * std::pow(ratio, 0.5 * n) * bessel(kind, n, arg);
}

double drifted_bessel(BesselKind kind, int n, double a, double b) {
  if (kind == BesselKind::J && b * b < a * a)
    throw Error(ErrorKind::DomainError, "drifted J requires b^2 >= a^2");
  if (kind == BesselKind::I && a * a < b * b)
    throw Error(ErrorKind::DomainError, "drifted I requires a^2 >= b^2");
  const double A = a + b;
  const double C = a - b;
  if (A == 0.0 || C == 0.0) return drifted_bessel_closed_form(kind, n, a, b);
  // rescale z = ρw with ρ = √|C/A| so the exponent becomes √|AC| (±w ± 1/w)
  const double rho = std::sqrt(std::abs(C / A));
  const double t = std::sqrt(std::abs(A * C));
  const double base = bessel_radius(kind, std::abs(n), t);
  // for negative order the optimal radius is the reciprocal
  const double radius = rho * (n >= 0 ? base : 1.0 / base);
  const double lhs = exp_laurent_integral(A, C, n, radius);
  const double rhs = drifted_bessel_closed_form(kind, n, a, b);
  if (std::abs(lhs - rhs) > 1e-8 * std::max(1.0, std::abs(rhs)))
    log_warning("drifted_bessel contour/closed-form mismatch at order " + std::to_string(n));
  return lhs;
}

double airy_combination_contour(double a, double b) {
  const double x = a * a - b;
  // anchor on the real axis: through the real saddle when x ≥ 0, otherwise so that the rays
  // pass through the complex saddles -a ± i√|x|
  const double v0 = x >= 0.0 ? -a + std::sqrt(x) : -a - std::sqrt(-x / 3.0);
  const cplx dir = std::polar(1.0, kPi / 3.0);
  auto phase = [=](cplx v) { return v * v * v / 3.0 + a * v * v + b * v; };
  // peak of Re φ along the ray, then truncation radius where it drops 1e-18 below the peak
  double peak = phase(cplx(v0, 0.0)).real();
  const double drop = std::log(1e-18);
  double r_end = 0.0;
  for (double r = 0.0;; r += 0.125) {
    const double re = phase(v0 + r * dir).real();
    peak = std::max(peak, re);
    if (re - peak < drop && r > 1.0) {
      r_end = r;
      break;
    }
    if (r > 1e4) throw Error(ErrorKind::NonConvergent, "airy path truncation not found");
  }
  auto integrand = [=](double r) { return (std::exp(phase(v0 + r * dir) - peak) * dir).imag(); };
  double err = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, r_end, 20, 1e-14, &err);
  return std::exp(peak) * integral / kPi;
}

double airy_combination(double a, double b) {
  const double x = a * a - b;
  const double expo = 2.0 * a * a * a / 3.0 - a * b;
  // Ai underflows near x = 100; the exponent must stay representable on its own
  if (x < 80.0 && std::abs(expo) < 600.0) return std::exp(expo) * boost::math::airy_ai(x);
  return airy_combination_contour(a, b);
}

}  // namespace kpz
