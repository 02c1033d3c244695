#pragma once

#include <complex>
#include <functional>
#include <span>

namespace kpz {

using cplx = std::complex<double>;

struct Contour {
  cplx center{0.0, 0.0};
  double radius = 1.0;
  int node_count = 16;  // starting node count, power of two
};

struct QuadResult {
  cplx value;
  double est_error = 0.0;
  int nodes_used = 0;
};

inline constexpr double kDefaultQuadTol = 1e-12;
inline constexpr int kMaxQuadNodes = 1 << 20;

// (1/2πi)∮ f(z) dz over the anticlockwise circle, trapezoid rule with node doubling.
// Throws PoleOnContour if any listed pole lies within 1e-6·radius of the circle.
QuadResult circle_integral(const std::function<cplx(cplx)>& f, const Contour& c,
                           double tol = kDefaultQuadTol, std::span<const cplx> poles = {});

enum class BesselKind { J, I };

double bessel(BesselKind kind, int n, double arg);

// Series form of J_n / I_n; accurate when the terms do not cancel badly.
double bessel_series(BesselKind kind, int n, double arg);

// ((b+a)/(b-a))^{n/2} J_n(2√(b²-a²)) for kind J, ((a+b)/(a-b))^{n/2} I_n(2√(a²-b²)) for kind I,
// evaluated as (1/2πi)∮ dz/z e^{b(z-1/z)} e^{a(z+1/z)} z^{-n}.
double drifted_bessel(BesselKind kind, int n, double a, double b);

// Closed-form right-hand side of drifted_bessel, including the degenerate b² = a² limits.
double drifted_bessel_closed_form(BesselKind kind, int n, double a, double b);

// (1/2πi)∫ exp(v³/3 + a v² + b v) dv = Ai(a²-b)·exp(2a³/3 - ab); closed form when both factors are
// representable, otherwise the contour quadrature below.
double airy_combination(double a, double b);
// quadrature along rays at ±π/3 through the saddle
double airy_combination_contour(double a, double b);

inline double airy_ai(double x) { return airy_combination(0.0, -x); }

}  // namespace kpz
