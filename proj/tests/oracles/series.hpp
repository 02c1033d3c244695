#pragma once
// Independent power-series evaluations used as ground truth in tests.

#include <cmath>

namespace oracle {

// Σ_m (∓1)^m (x/2)^{2m+n} / (m!(m+n)!) in long double, n ≥ 0
inline long double bessel_series(bool modified, int n, long double x) {
  long double term = 1.0L;
  for (int k = 1; k <= n; ++k) term *= (x / 2.0L) / k;
  long double sum = term;
  for (int m = 1; m < 400; ++m) {
    term *= (modified ? 1.0L : -1.0L) * (x / 2.0L) * (x / 2.0L) / (static_cast<long double>(m) * (m + n));
    sum += term;
    if (std::fabs(term) < 1e-30L) break;
  }
  return sum;
}

inline long double J(int n, long double x) {
  if (n < 0) return (n % 2 ? -1.0L : 1.0L) * bessel_series(false, -n, x);
  return bessel_series(false, n, x);
}

inline long double I(int n, long double x) { return bessel_series(true, n < 0 ? -n : n, x); }

// Maclaurin series Ai(x) = c1 f(x) - c2 g(x)
inline long double airy_ai(long double x) {
  const long double c1 = 1.0L / (std::pow(3.0L, 2.0L / 3.0L) * std::tgamma(2.0L / 3.0L));
  const long double c2 = 1.0L / (std::pow(3.0L, 1.0L / 3.0L) * std::tgamma(1.0L / 3.0L));
  long double f = 1.0L, g = x;
  long double tf = 1.0L, tg = x;
  const long double x3 = x * x * x;
  for (int k = 1; k < 200; ++k) {
    tf *= x3 / ((3.0L * k - 1.0L) * (3.0L * k));
    tg *= x3 / ((3.0L * k) * (3.0L * k + 1.0L));
    f += tf;
    g += tg;
    if (std::fabs(tf) + std::fabs(tg) < 1e-30L) break;
  }
  return c1 * f - c2 * g;
}

}  // namespace oracle
