#include "kpz/tasep_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "kpz/error.hpp"

namespace kpz {

void ModelParams::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::DomainError, "q must lie in (0,1)");
}

ModelParams ModelParams::from_q(double q) {
  ModelParams m{q};
  m.validate();
  return m;
}

bool precedes(const SpaceTimePoint& a, const SpaceTimePoint& b) {
  return b.n >= a.n && b.t <= a.t && !(a == b);
}

void ObservationPath::validate() const {
  if (points.empty()) throw Error(ErrorKind::DomainError, "observation path is empty");
  if (points.size() != cuts.size()) throw Error(ErrorKind::DomainError, "one cut per point required");
  for (const auto& pt : points)
    if (pt.t < 0) throw Error(ErrorKind::DomainError, "observation time must be nonnegative");
  for (size_t k = 1; k < points.size(); ++k)
    if (!precedes(points[k - 1], points[k]))
      throw Error(ErrorKind::DomainError, "path points must be space-like ordered");
}

void InitialCondition::validate() const {
  if (kind == Kind::FiniteList) {
    if (y.empty()) throw Error(ErrorKind::DomainError, "finite initial condition needs positions");
    for (size_t i = 1; i < y.size(); ++i)
      if (!(y[i] < y[i - 1])) throw Error(ErrorKind::DomainError, "initial positions must strictly decrease");
  }
}

int InitialCondition::position(int label) const {
  if (kind == Kind::AlternatingInfinite) return -2 * label;
  if (label < 1 || label > static_cast<int>(y.size()))
    throw Error(ErrorKind::OutOfRange, "label outside the finite initial condition");
  return y[label - 1];
}

Radii default_radii(const ModelParams& params) {
  const double p = params.p();
  const double q = params.q;
  return {0.4 * std::min(1.0, 1.0 / p), 0.4 * std::min(1.0, q / p), 1.0 + 0.4 * (1.0 / p - 1.0)};
}

namespace {

// (alpha + beta·w)^k
struct Factor {
  cplx alpha;
  cplx beta;
  int k;
};

cplx eval_factors(cplx w, const std::vector<Factor>& fs, double log_const) {
  cplx acc(log_const, 0.0);
  for (const Factor& f : fs)
    if (f.k != 0) acc += static_cast<double>(f.k) * std::log(f.alpha + f.beta * w);
  return std::exp(acc);
}

bool has_pole_inside(const std::vector<Factor>& fs, const Contour& c) {
  for (const Factor& f : fs) {
    if (f.k >= 0 || f.beta == 0.0) continue;
    if (std::abs(-f.alpha / f.beta - c.center) < c.radius) return true;
  }
  return false;
}

std::vector<cplx> poles_of(const std::vector<Factor>& fs) {
  std::vector<cplx> out;
  for (const Factor& f : fs)
    if (f.k < 0 && f.beta != 0.0) out.push_back(-f.alpha / f.beta);
  return out;
}

double checked_real(const QuadResult& r, const char* what) {
  const double re = r.value.real();
  const double im = r.value.imag();
  if (std::abs(im) > std::max({1e-8 * std::abs(re), 1e-11, 10.0 * r.est_error}))
  {
    char buf[160];
    std::snprintf(buf, sizeof buf, ": imaginary part %.3e vs real %.3e", im, re);
    throw Error(ErrorKind::NumericalInconsistency, std::string(what) + buf);
  }
  return re;
}

// log of an upper bound for |Π factors| on the circle (center c, radius rho)
double log_bound(const std::vector<Factor>& fs, cplx center, double rho) {
  double acc = 0.0;
  for (const Factor& f : fs) {
    if (f.k == 0) continue;
    const double d = std::abs(f.alpha + f.beta * center);
    const double s = std::abs(f.beta) * rho;
    acc += f.k > 0 ? f.k * std::log(d + s) : f.k * std::log(std::abs(d - s));
  }
  return acc;
}

// Keep the center and the set of enclosed poles of `c`, move the radius to minimize the
// integrand bound; large exponent gaps otherwise cause cancellation on a badly sized circle.
Contour tuned_contour(const std::vector<Factor>& fs, const Contour& c) {
  double lo = 0.0, hi = std::numeric_limits<double>::infinity();
  for (const cplx& pole : poles_of(fs)) {
    const double d = std::abs(pole - c.center);
    if (d < c.radius) lo = std::max(lo, d);
    else hi = std::min(hi, d);
  }
  const double a = lo > 0.0 ? lo * 1.02 : 1e-3 * c.radius;
  const double b = std::isfinite(hi) ? hi * 0.98 : 100.0 * std::max({1.0, c.radius, lo});
  if (!(b > a)) return c;
  const double la = std::log(a), lb = std::log(b);
  double best_rho = c.radius;
  double best = log_bound(fs, c.center, c.radius);
  constexpr int kGrid = 48;
  for (int i = 0; i <= kGrid; ++i) {
    const double rho = std::exp(la + (lb - la) * i / kGrid);
    const double v = log_bound(fs, c.center, rho);
    if (v < best) {
      best = v;
      best_rho = rho;
    }
  }
  return Contour{c.center, best_rho, c.node_count};
}

// (1/2πi)∮ Π factors · e^{log_const} · extra(w), zero when no pole is enclosed
template <class Extra>
double product_integral(const std::vector<Factor>& fs, double log_const, const Contour& c, Extra extra,
                        const char* what) {
  if (!has_pole_inside(fs, c)) return 0.0;
  const auto poles = poles_of(fs);
  const Contour tuned = tuned_contour(fs, c);
  auto f = [&](cplx w) { return eval_factors(w, fs, log_const) * extra(w); };
  return checked_real(circle_integral(f, tuned, kDefaultQuadTol, poles), what);
}

double product_integral(const std::vector<Factor>& fs, double log_const, const Contour& c, const char* what) {
  return product_integral(fs, log_const, c, [](cplx) { return cplx(1.0); }, what);
}

// (1/(2πi)²)∮_w∮_z A(w) B(z) C(w,z), A/B given as factor products times extras; tensor-product
// trapezoid with both node counts doubled together.
template <class WExtra, class ZExtra, class Coupling>
QuadResult tensor_integral(const std::vector<Factor>& wf, cplx cw, double rw, WExtra wextra, const std::vector<Factor>& zf,
                     cplx cz, double rz, ZExtra zextra, Coupling coupling, const char* what) {
  std::vector<cplx> wn, wv, zn, zv;
  cplx prev{std::numeric_limits<double>::quiet_NaN(), 0.0};
  for (int n = 16; n <= 4096; n *= 2) {
    wn.resize(n), wv.resize(n), zn.resize(n), zv.resize(n);
    for (int i = 0; i < n; ++i) {
      const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * i / n);
      wn[i] = cw + rw * e;
      wv[i] = eval_factors(wn[i], wf, 0.0) * wextra(wn[i]) * (rw * e);
      zn[i] = cz + rz * e;
      zv[i] = eval_factors(zn[i], zf, 0.0) * zextra(zn[i]) * (rz * e);
    }
    cplx sum{0.0, 0.0};
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx row{0.0, 0.0};
      double row_peak = 0.0;
      for (int j = 0; j < n; ++j) {
        const cplx term = zv[j] * coupling(wn[i], zn[j]);
        row += term;
        row_peak = std::max(row_peak, std::abs(term));
      }
      sum += wv[i] * row;
      peak = std::max(peak, row_peak * std::abs(wv[i]));
    }
    const cplx value = sum / (static_cast<double>(n) * n);
    const double change = std::abs(value - prev);
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * peak;
    if (n >= 64 && change < std::max(kDefaultQuadTol * std::max(1.0, std::abs(value)), floor))
      return QuadResult{value, std::max(change, floor), n};
    prev = value;
  }
  throw Error(ErrorKind::NonConvergent, std::string(what) + ": double integral did not converge");
}

// Radius pair (w circle, z circle) minimizing the integrand bound over a log grid, subject to
// `feasible(rw, rz)`; `penalty` adds the log of the coupling bound.
template <class Feasible, class Penalty>
std::pair<double, double> tune_pair(const std::vector<Factor>& wf, cplx cw, double w_lo, double w_hi,
                                    const std::vector<Factor>& zf, cplx cz, double z_lo, double z_hi,
                                    Feasible feasible, Penalty penalty) {
  constexpr int kGrid = 32;
  double best_cost = std::numeric_limits<double>::infinity();
  std::pair<double, double> best{-1.0, -1.0};
  for (int i = 0; i <= kGrid; ++i) {
    const double rz = std::exp(std::log(z_lo) + (std::log(z_hi) - std::log(z_lo)) * i / kGrid);
    for (int j = 0; j <= kGrid; ++j) {
      const double rw = std::exp(std::log(w_lo) + (std::log(w_hi) - std::log(w_lo)) * j / kGrid);
      if (!feasible(rw, rz)) continue;
      const double c = log_bound(wf, cw, rw) + log_bound(zf, cz, rz) + penalty(rw, rz);
      if (c < best_cost) {
        best_cost = c;
        best = {rw, rz};
      }
    }
  }
  if (best.first < 0.0) throw Error(ErrorKind::ContourConflict, "no admissible contour pair");
  return best;
}

constexpr cplx kZero{0.0, 0.0};
constexpr cplx kOne{1.0, 0.0};

}  // namespace

double F(int n, int x, int t, const ModelParams& params) {
  const double p = params.p();
  const Radii r = default_radii(params);
  const std::vector<Factor> fs{{kZero, kOne, -n}, {kOne, kOne, n - x - 1}, {kOne, p, t}};
  return product_integral(fs, 0.0, Contour{0.0, r.gamma0_m1, 32}, "F");
}

double phi_sharp(int x, int y, const ModelParams& params) {
  if (y >= x) return 1.0;
  if (y == x - 1) return params.p();
  return 0.0;
}

double phi_pair(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2, const ModelParams& params) {
  const int dt = p1.t - p2.t, dx = x1 - x2, dn = p1.n - p2.n;
  const double p = params.p();
  const std::vector<Factor> fs{{kZero, -kOne, dn}, {kOne, kOne, -dx - 1 - dn}, {kOne, p, dt - dn}};
  return product_integral(fs, 0.0, Contour{-1.0, default_radii(params).gamma_m1, 32}, "phi");
}

double phi_star(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2, const ModelParams& params) {
  if (!precedes(p1, p2)) return 0.0;
  const int dt = p1.t - p2.t, dx = x1 - x2, dn = p1.n - p2.n;
  const double p = params.p();
  const std::vector<Factor> fs{{kZero, kOne, dn}, {kOne, kOne, -dx - 1 - dn}, {kOne, p, dt - dn}};
  return product_integral(fs, 0.0, Contour{0.0, default_radii(params).gamma0_m1, 32}, "phi*");
}

double phi_star_origin_part(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                            const ModelParams& params) {
  const int dt = p1.t - p2.t, dx = x1 - x2, dn = p1.n - p2.n;
  const double p = params.p();
  const std::vector<Factor> fs{{kZero, kOne, dn}, {kOne, kOne, -dx - 1 - dn}, {kOne, p, dt - dn}};
  return product_integral(fs, 0.0, Contour{0.0, default_radii(params).gamma0, 32}, "phi* origin part");
}

double Psi(int n, int t, int j, int x, const ModelParams& params) {
  const double p = params.p();
  const std::vector<Factor> fs{{kZero, kOne, j}, {kOne, p, t - j}, {kOne, kOne, -(x + 2 * n - j + 1)}};
  return product_integral(fs, 0.0, Contour{0.0, default_radii(params).gamma0_m1, 32}, "Psi");
}

namespace {

std::vector<Factor> phi_dual_factors(int n, int t, int j, int x, double p) {
  return {{kOne, kOne, x + 2 * n - j - 1}, {kZero, kOne, -(j + 1)}, {kOne, p, -(t - j + 1)}};
}

cplx quadratic_factor(cplx z, double p) { return 1.0 + 2.0 * z + p * z * z; }

}  // namespace

double Phi(int n, int t, int j, int x, const ModelParams& params) {
  if (j == 0) return 1.0;
  const double p = params.p();
  return product_integral(phi_dual_factors(n, t, j, x, p), 0.0, Contour{0.0, default_radii(params).gamma0, 32},
                          [p](cplx z) { return quadratic_factor(z, p); }, "Phi");
}

namespace {

using Series = std::vector<long double>;

// Taylor coefficients of (1 + c u)^a up to u^{order}
Series binomial_series(long double a, long double c, int order) {
  Series out(order + 1);
  out[0] = 1.0L;
  for (int i = 1; i <= order; ++i) out[i] = out[i - 1] * (a - (i - 1)) / i * c;
  return out;
}

Series mul(const Series& a, const Series& b) {
  Series out(std::min(a.size(), b.size()), 0.0L);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t l = 0; l <= i; ++l) out[i] += a[l] * b[i - l];
  return out;
}

// Ψ_j(x) = Res_{w=-1}: with u = 1+w, [u^{M-1}] (u-1)^j (q+pu)^{t-j}, M = x+2n-j+1
long double psi_residue(int n, int t, int j, int x, long double q) {
  const int M = x + 2 * n - j + 1;
  if (M <= 0) return 0.0L;
  const long double p = 1.0L - q;
  const Series s = mul(binomial_series(j, -1.0L, M - 1), binomial_series(t - j, p / q, M - 1));
  return ((j % 2) ? -1.0L : 1.0L) * std::pow(q, static_cast<long double>(t - j)) * s[M - 1];
}

// Φ_k(x) = [z^k] (1+z)^{x+2n-k-1} (1+pz)^{-(t-k+1)} (1+2z+pz²)
Series phi_integrand_series(int n, int t, int k, int x, long double q) {
  const long double p = 1.0L - q;
  Series s = mul(binomial_series(x + 2 * n - k - 1, 1.0L, k), binomial_series(-(t - k + 1), p, k));
  Series quad(k + 1, 0.0L);
  quad[0] = 1.0L;
  if (k >= 1) quad[1] = 2.0L;
  if (k >= 2) quad[2] = p;
  return mul(s, quad);
}

}  // namespace

double psi_phi_pairing(int n, int t, int j, int k, const ModelParams& params) {
  if (n < 1 || j < 0 || k < 0 || j >= n || k >= n)
    throw Error(ErrorKind::DomainError, "psi_phi_pairing needs 0 <= j, k < n");
  const long double q = params.q;
  const long double p = 1.0L - q;
  const int x_lo = -2 * n + j;
  const int X = std::max(x_lo, t + j - 2 * n + 1);
  long double sum = 0.0L;
  for (int x = x_lo; x < X; ++x) sum += psi_residue(n, t, j, x, q) * phi_integrand_series(n, t, k, x, q)[k];
  if (t >= j) return static_cast<double>(sum);  // Ψ_j vanishes identically from X on
  // Tail Σ_{x≥X} Ψ_j(x)Φ_k(x), summed inside the integrals (analytic continuation of the geometric
  // series when it diverges): -Res_{z=0} Φ-integrand(z, X) · Res_{w=-1/p} G(w)/(w-z), with
  // G(w) = w^j (1+pw)^{t-j} (1+w)^{-e}, from the Taylor coefficients of G(-1/p+u) (pu)^{j-t}.
  const int e = 2 * n - j + X;
  const int m = j - t;
  const Series g = mul(binomial_series(j, -p, m - 1), binomial_series(-e, -p / q, m - 1));
  const long double lead = std::pow(-1.0L / p, static_cast<long double>(j)) *
                           std::pow(-q / p, static_cast<long double>(-e)) *
                           std::pow(p, static_cast<long double>(t - j));
  // Res_w = -Σ_i lead·g_i (z+1/p)^{-(m-i)} = -Σ_i lead·g_i p^{m-i} (1+pz)^{-(m-i)}
  Series residue(k + 1, 0.0L);
  for (int i = 0; i < m; ++i) {
    const Series b = binomial_series(-(m - i), p, k);
    const long double c = -lead * g[i] * std::pow(p, static_cast<long double>(m - i));
    for (int l = 0; l <= k; ++l) residue[l] += c * b[l];
  }
  const long double tail = mul(phi_integrand_series(n, t, k, X, q), residue)[k];
  return static_cast<double>(sum - tail);
}

double K_flat_tilde(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2, const ModelParams& params) {
  const double p = params.p();
  const int a = x2 + p1.n + p2.n;
  const int b = x1 + p1.n + p2.n + 1;
  const int c = p1.t + p2.t + 1 - (x1 + p1.n + p2.n);
  const int e = p1.t - 2 * p1.n - x1;
  const std::vector<Factor> fs{{kOne, kOne, a}, {kZero, -kOne, -b}, {kOne, p, -c}};
  const double log_const = static_cast<double>(e) * std::log(params.q);
  return -product_integral(fs, log_const, Contour{0.0, default_radii(params).gamma0, 32}, "Kt");
}

double K_flat(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2, const ModelParams& params) {
  double value = K_flat_tilde(p1, p2, x1, x2, params);
  if (precedes(p1, p2)) value -= phi_pair(p1, p2, x1, x2, params);
  return value;
}

FiniteNRadii finiteN_radii(const ModelParams& params) {
  const double q = params.q, p = params.p();
  const double rw = std::min(0.6 * q / p, 0.45);
  const double rz = std::min({0.4, 0.9 - rw, 0.6 * rw / (q + 0.6 * p * rw)});
  if (!(rz > 1e-3))
    throw Error(ErrorKind::ContourConflict, "no admissible contour pair for q = " + std::to_string(q));
  return {rz, rw};
}

double K_finiteN_double(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                        const ModelParams& params) {
  const double p = params.p(), q = params.q;
  finiteN_radii(params);
  const std::vector<Factor> wf{{kZero, kOne, p1.n}, {kOne, p, p1.t - p1.n + 1}, {kOne, kOne, -(x1 + p1.n + 1)}};
  const std::vector<Factor> zf{{kOne, kOne, x2 + p2.n}, {kZero, kOne, -p2.n}, {kOne, p, -(p2.t - p2.n + 2)}};
  // image of Γ0 under z ↦ -(1+z)/(1+pz) stays inside Γ-1 (margin 0.7), Γ-1 clear of -1/p, 0.1 gap
  auto image = [&](double rz) { return q * rz / (1.0 - p * rz); };
  const auto [rw, rz] = tune_pair(
      wf, -1.0, 1e-4 * q / p, std::min(0.9 * q / p, 0.9), zf, 0.0, 1e-3, 0.4,
      [&](double a, double b) { return image(b) < 0.7 * a && a + b <= 0.9; },
      [&](double a, double b) { return -std::log(a - image(b)) - std::log(1.0 - a - b); });
  const QuadResult value = tensor_integral(
      wf, -1.0, rw, [](cplx) { return cplx(1.0); }, zf, 0.0, rz, [p](cplx z) { return quadratic_factor(z, p); },
      [p](cplx w, cplx z) { return 1.0 / ((w - z) * (w + (1.0 + z) / (1.0 + p * z))); }, "finite-N kernel");
  return checked_real(value, "finite-N kernel");
}

double K_finiteN(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2, const ModelParams& params,
                 int N) {
  if (p1.n > N || p2.n > N || p1.n < 1 || p2.n < 1)
    throw Error(ErrorKind::DomainError, "finite-N kernel needs 1 <= n <= N");
  double value = K_finiteN_double(p1, p2, x1, x2, params);
  if (precedes(p1, p2)) {
    const double sign = ((p1.n - p2.n) % 2 == 0) ? 1.0 : -1.0;
    value -= sign * phi_pair(p1, p2, x1, x2, params);
  }
  return value;
}

double K_finiteN_sum_form(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                          const ModelParams& params) {
  double sum = 0.0;
  for (int k = 1; k <= p2.n; ++k)
    sum += Psi(p1.n, p1.t, p1.n - k, x1, params) * Phi(p2.n, p2.t, p2.n - k, x2, params);
  return sum - phi_star(p1, p2, x1, x2, params);
}

double conjugate_factor(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                        const ModelParams& params) {
  const double sq = std::sqrt(params.q);
  return std::pow(sq / (1.0 + sq), x1 - x2) * std::pow(params.q, p1.n - p2.n) *
         std::pow(params.q, -0.5 * (p1.t - p2.t));
}

double png_conjugate_factor(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                            const ModelParams& params) {
  return std::pow(params.q, 0.5 * (x1 - x2) + (p1.n - p2.n) - 0.5 * (p1.t - p2.t));
}

double K_flat_conjugated(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                         const ModelParams& params) {
  const double sq = std::sqrt(params.q);
  const double p = params.p();
  // K̃ with z = -w/(w+√q)
  double value = 0.0;
  {
    const int b = x1 + p1.n + p2.n + 1;
    const int c = p1.t + p2.t + 1 - (x1 + p1.n + p2.n);
    const int e = p1.t + p2.t - x2 - p1.n - p2.n;
    const std::vector<Factor> fs{{kZero, kOne, -b}, {cplx(sq), kOne, e}, {kOne, cplx(sq), -c}};
    const double radius = e >= 0 ? std::min(1.0, 0.5 / sq) : 0.5 * sq;
    value += product_integral(fs, 0.0, Contour{0.0, radius, 32}, "conjugated Kt");
  }
  if (precedes(p1, p2)) {
    // φ with w = -1 + √q z
    const int dt = p1.t - p2.t, dx = x1 - x2, dn = p1.n - p2.n;
    const std::vector<Factor> fs{{kZero, kOne, -1 - dx - dn}, {cplx(sq), cplx(p), dt - dn}, {kOne, cplx(-sq), dn}};
    double radius = std::min(1.0, 0.5 / sq);
    if (dt - dn < 0) radius = std::min(radius, 0.5 * sq / p);
    value -= product_integral(fs, 0.0, Contour{0.0, radius, 32}, "conjugated phi");
  }
  return value;
}

}  // namespace kpz
