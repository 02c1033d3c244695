#include "kpz/png_kernels.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "kpz/contour.hpp"
#include "kpz/error.hpp"

namespace kpz {

void PNGObservation::validate() const {
  if (points.empty()) throw Error(ErrorKind::DomainError, "PNG observation needs at least one point");
  if (cuts.size() != points.size()) throw Error(ErrorKind::IncompatibleInputs, "one cut per PNG point required");
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!(points[k].t > 0.0)) throw Error(ErrorKind::DomainError, "PNG times must be positive");
    if (k == 0) continue;
    const double dx = points[k].x - points[k - 1].x;
    const double dt = points[k - 1].t - points[k].t;
    if (dx > 0.0 && dx < dt) throw Error(ErrorKind::DomainError, "consecutive PNG points are not space-like");
  }
}

void AiryObservation::validate() const {
  if (taus.empty()) throw Error(ErrorKind::DomainError, "Airy observation needs at least one time");
  if (cuts.size() != taus.size()) throw Error(ErrorKind::IncompatibleInputs, "one cut per Airy time required");
  for (std::size_t k = 1; k < taus.size(); ++k)
    if (!(taus[k] > taus[k - 1])) throw Error(ErrorKind::DomainError, "Airy times must be strictly increasing");
}

namespace {

double power_over_factorial(double base, int n) {
  double v = 1.0;
  for (int k = 1; k <= n; ++k) v *= base / k;
  return v;
}

}  // namespace

double K_png_fixed_time(double t, double x1, int h1, double x2, int h2) {
  if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "PNG time must be positive, got " + std::to_string(t));
  const double dx = x2 - x1;
  double value = 0.0;
  if (dx > 0.0) value -= bessel(BesselKind::I, std::abs(h1 - h2), 2.0 * dx);
  const double T = 2.0 * t;
  const int n = h1 + h2;
  if (T < std::abs(dx)) return value;
  if (T == dx) {
    value += n >= 0 ? power_over_factorial(2.0 * T, n) : 0.0;
  } else if (T == -dx) {
    value += n <= 0 ? power_over_factorial(-2.0 * T, -n) : 0.0;
  } else {
    const double ratio = (T + dx) / (T - dx);
    value += std::pow(ratio, 0.5 * n) * bessel(BesselKind::J, n, 2.0 * std::sqrt(T * T - dx * dx));
  }
  return value;
}

double K_png_spacelike(const PNGPoint& p1, int h1, const PNGPoint& p2, int h2) {
  if (!(p1.t > 0.0) || !(p2.t > 0.0)) throw Error(ErrorKind::DomainError, "PNG times must be positive");
  const double dx = p2.x - p1.x;
  const double dt = p1.t - p2.t;
  if (std::abs(dt) > std::abs(dx))
    throw Error(ErrorKind::DomainError, "PNG points are time-like separated, dx = " + std::to_string(dx) +
                                            ", dt = " + std::to_string(dt));
  double value = 0.0;
  if ((dx >= dt && dt > 0.0) || (dx > dt && dt >= 0.0)) value -= drifted_bessel(BesselKind::I, h2 - h1, dx, -dt);
  if (p1.t + p2.t >= std::abs(dx)) value += drifted_bessel(BesselKind::J, h1 + h2, dx, p1.t + p2.t);
  return value;
}

double K_airy1(double tau1, double xi1, double tau2, double xi2) {
  const double d = tau2 - tau1;
  double value = 0.0;
  if (d > 0.0) {
    const double diff = xi2 - xi1;
    value -= std::exp(-diff * diff / (4.0 * d)) / std::sqrt(4.0 * std::numbers::pi * d);
  }
  return value + airy_combination(d, -(xi1 + xi2));
}

ThetaPi theta_pi_from_gamma(double gamma_value, double x) {
  return {(gamma_value - x) / 4.0, (3.0 * gamma_value + x) / 4.0};
}

}  // namespace kpz
