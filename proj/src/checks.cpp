#include "kpz/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "kpz/contour.hpp"
#include "kpz/dynamics.hpp"
#include "kpz/error.hpp"
#include "kpz/fredholm.hpp"
#include "kpz/png_kernels.hpp"
#include "kpz/scaling.hpp"
#include "kpz/stats.hpp"
#include "kpz/tasep_kernels.hpp"

namespace kpz {

namespace {

template <class Body>
CheckResult timed(std::string name, double tolerance, Body&& body) {
  CheckResult r;
  r.name = std::move(name);
  r.tolerance = tolerance;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(r);
    r.passed = r.worst <= tolerance && r.detail.find("FAILED") == std::string::npos;
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

ParticleConfig config(std::vector<int> x) { return {std::move(x), 0}; }

std::vector<int> prefix(const std::vector<int>& v, int n) { return {v.begin(), v.begin() + n}; }

double rel_dev(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

CheckResult check_transition_formula(CheckScale scale) {
  const bool full = scale == CheckScale::Full;
  return timed("transition determinant vs enumeration", 1e-10, [&](CheckResult& r) {
    const std::vector<std::vector<int>> bases{{0, -1, -2, -3}, {-2, -4, -6, -8}, {1, -1, -2, -5}};
    const int n_max = full ? 4 : 3, t_max = full ? 4 : 2;
    const std::vector<double> qs = full ? std::vector<double>{0.3, 0.5} : std::vector<double>{0.5};
    for (double q : qs) {
      const ModelParams mp{q};
      for (int n = 1; n <= n_max; ++n)
        for (const auto& base : bases) {
          const auto y = config(prefix(base, n));
          for (int t = 0; t <= t_max; ++t)
            for (const auto& [x, w] : brute_force_law(y, t, mp)) {
              r.worst = std::max(r.worst, std::abs(G_det(y, config(x), t, mp) - w));
              ++r.cases;
            }
        }
    }
    r.detail = fmt::format("N<={}, t<={}, {} q values", n_max, t_max, qs.size());
  });
}

CheckResult check_signed_marginal(CheckScale scale) {
  const bool full = scale == CheckScale::Full;
  return timed("signed-measure marginal vs transition determinant", 1e-8, [&](CheckResult& r) {
    const std::vector<std::vector<int>> bases{{-2, -4, -6}, {0, -1, -2}, {0, -2, -3}};
    const int n_max = full ? 3 : 2, t_max = full ? 3 : 2;
    int heavy_cells = 0;
    for (int n = 1; n <= n_max; ++n)
      for (int t = 0; t <= t_max; ++t) {
        // rows with negative time only sum for q > 1/2
        const std::vector<double> qs = t >= n - 1 ? std::vector<double>{0.3, 0.5} : std::vector<double>{0.7};
        if (t < n - 1) ++heavy_cells;
        for (double q : qs) {
          const ModelParams mp{q};
          for (const auto& base : bases) {
            const auto y = config(prefix(base, n));
            for (const auto& [x, w] : brute_force_law(y, t, mp)) {
              (void)w;
              const auto xc = config(x);
              r.worst = std::max(r.worst, std::abs(W_marginal(y, xc, t, mp) - G_det(y, xc, t, mp)));
              ++r.cases;
            }
          }
        }
      }
    r.detail = fmt::format("N<={}, t<={}; {} cells with t<N-1 use q=0.7", n_max, t_max, heavy_cells);
  });
}

CheckResult check_initial_condition(CheckScale scale, std::uint64_t seed) {
  const int per_n = scale == CheckScale::Full ? 50 : 10;
  return timed("transition determinant at t=0 is the identity", 1e-12, [&](CheckResult& r) {
    std::mt19937_64 gen(seed);
    const ModelParams mp{0.5};
    auto random_config = [&](int n) {
      std::vector<int> sites(21);
      std::iota(sites.begin(), sites.end(), -15);
      std::shuffle(sites.begin(), sites.end(), gen);
      std::vector<int> y(sites.begin(), sites.begin() + n);
      std::sort(y.rbegin(), y.rend());
      return y;
    };
    for (int n = 1; n <= 5; ++n)
      for (int i = 0; i < per_n; ++i) {
        const auto y = random_config(n);
        r.worst = std::max(r.worst, std::abs(G_det(config(y), config(y), 0, mp) - 1.0));
        auto x = random_config(n);
        if (x == y) x.front() += 1;
        r.worst = std::max(r.worst, std::abs(G_det(config(y), config(x), 0, mp)));
        r.cases += 2;
      }
    r.detail = fmt::format("{} configurations per N<=5", per_n);
  });
}

CheckResult check_F_identities(CheckScale scale) {
  const bool full = scale == CheckScale::Full;
  return timed("F recurrences, convolution, vanishing, special values", 1e-10, [&](CheckResult& r) {
    const std::vector<double> qs = full ? std::vector<double>{0.3, 0.5, 0.7} : std::vector<double>{0.5};
    const int nb = full ? 5 : 3, xb = full ? 8 : 5, tb = full ? 8 : 4;
    auto note = [&](double dev) {
      r.worst = std::max(r.worst, dev);
      ++r.cases;
    };
    double vanishing = 0.0;
    for (double q : qs) {
      const ModelParams mp{q};
      const double p = mp.p();
      // F_n(y,t) summed over y >= x until the terms stay below 1e-16
      auto tail_sum = [&](int n, int x, int t) {
        double s = 0.0;
        int quiet = 0;
        for (int y = x; y <= x + 400 && quiet < 3; ++y) {
          const double f = F(n, y, t, mp);
          s += f;
          quiet = (y > t && std::abs(f) < 1e-16) ? quiet + 1 : 0;
        }
        return s;
      };
      for (int n = -nb; n <= nb; ++n)
        for (int t = 0; t <= tb; ++t)
          for (int x = -xb; x <= xb; ++x) {
            const double next = F(n, x, t + 1, mp);
            const double here = F(n, x, t, mp), left = F(n, x - 1, t, mp);
            const double scale_next = std::max(1.0, std::abs(next));
            note(std::abs(next - (q * here + p * left)) / scale_next);
            note(std::abs(next - (here + p * F(n - 1, x - 1, t, mp))) / scale_next);
            const double tail = tail_sum(n, x, t);
            note(rel_dev(p * left + tail, F(n + 1, x, t + 1, mp)));
            note(rel_dev(tail, F(n + 1, x, t, mp)));
          }
      for (int n = 1; n <= nb; ++n) {
        for (int x = -n - 8; x < -n; ++x) vanishing = std::max(vanishing, std::abs(F(-n, x, -n, mp)));
        for (int x = n + 1; x <= n + 8; ++x) vanishing = std::max(vanishing, std::abs(F(n, x, n, mp)));
      }
      for (int n = 0; n <= nb; ++n) {
        note(rel_dev(F(n, n, n, mp), std::pow(p, n)));
        const double special = std::pow(-q, -n);
        note(std::abs(F(-n, -n, -n, mp) - special) / std::max(1.0, std::abs(special)));
      }
    }
    r.detail = fmt::format("|n|<={}, |x|<={}, 0<=t<={}, {} q values; vanishing {:.1e} (tol 1e-12)", nb, xb, tb,
                           qs.size(), vanishing);
    if (vanishing >= 1e-12) r.detail += " FAILED";
  });
}

CheckResult check_orthonormality(CheckScale scale) {
  const bool full = scale == CheckScale::Full;
  return timed("orthonormality of Psi and Phi", 1e-10, [&](CheckResult& r) {
    const int n_max = full ? 8 : 4, t_max = full ? 10 : 5;
    for (double q : {0.3, 0.5, 0.7}) {
      const ModelParams mp{q};
      for (int n = 1; n <= n_max; ++n)
        for (int t = 0; t <= t_max; ++t)
          for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
              r.worst = std::max(r.worst, std::abs(psi_phi_pairing(n, t, j, k, mp) - (j == k ? 1.0 : 0.0)));
              ++r.cases;
            }
    }
    r.detail = fmt::format("n<={}, t<={}, q in {{0.3, 0.5, 0.7}}", n_max, t_max);
  });
}

CheckResult check_kernel_forms(CheckScale scale, std::uint64_t seed) {
  const int instances = scale == CheckScale::Full ? 100 : 20;
  return timed("finite-N kernel forms and flat-kernel region", 1e-9, [&](CheckResult& r) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> dn(1, 4), dt(0, 5), dx(-9, 3), qi(0, 2);
    const double qs[] = {0.3, 0.5, 0.7};
    auto comparable = [&] {
      SpaceTimePoint a{dn(gen), dt(gen)}, b{dn(gen), dt(gen)};
      if (!(a == b || precedes(a, b) || precedes(b, a))) std::swap(a.t, b.t);
      return std::pair{a, b};
    };
    double worst_sum = 0.0, worst_flat = 0.0;
    for (int i = 0; i < instances; ++i) {
      const ModelParams mp{qs[qi(gen)]};
      const auto [a, b] = comparable();
      const int x1 = dx(gen), x2 = dx(gen);
      worst_sum = std::max(worst_sum, rel_dev(K_finiteN(a, b, x1, x2, mp, 10), K_finiteN_sum_form(a, b, x1, x2, mp)));
    }
    for (int i = 0; i < instances; ++i) {
      const ModelParams mp{qs[qi(gen)]};
      const auto [a, b] = comparable();
      // left of every starting site: x1 + n1 + 1 <= 0
      const int x1 = std::uniform_int_distribution<int>(-a.n - 8, -a.n - 1)(gen), x2 = dx(gen);
      const double sign = ((a.n - b.n) % 2) ? -1.0 : 1.0;
      worst_flat = std::max(worst_flat, rel_dev(K_finiteN(a, b, x1, x2, mp, 10), sign * K_flat(a, b, x1, x2, mp)));
    }
    r.worst = std::max(worst_sum, worst_flat);
    r.cases = 2 * instances;
    r.detail = fmt::format("{} instances each; sum form {:.2e}, flat region {:.2e}", instances, worst_sum, worst_flat);
  });
}

CheckResult check_tasep_monte_carlo(CheckScale scale, std::uint64_t seed, int threads) {
  const std::int64_t samples = scale == CheckScale::Full ? 1000000 : 100000;
  return timed("two-point Fredholm determinant vs Monte Carlo", 4.0, [&](CheckResult& r) {
    const ModelParams mp{0.5};
    const std::vector<std::vector<SpaceTimePoint>> paths{{{2, 10}, {4, 8}}, {{1, 6}, {3, 6}}, {{3, 10}, {3, 7}}};
    int pi = 0;
    for (const auto& pts : paths) {
      const auto xs = sample_tasep_points(mp, pts, samples, RngSpec{seed, static_cast<std::uint64_t>(pi++)}, threads);
      std::vector<int> med(2);
      for (int k = 0; k < 2; ++k) {
        auto v = xs[k];
        std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
        med[k] = v[v.size() / 2];
      }
      for (int d1 = -1; d1 <= 1; ++d1)
        for (int d2 = -1; d2 <= 1; ++d2) {
          const std::vector<int> cuts{med[0] + d1, med[1] + d2};
          const double exact = joint_prob_tasep(ObservationPath{pts, cuts}, mp);
          std::int64_t hits = 0;
          for (std::int64_t s = 0; s < samples; ++s) hits += (xs[0][s] >= cuts[0] && xs[1][s] >= cuts[1]);
          r.worst = std::max(r.worst, binomial_z(static_cast<double>(hits) / samples, exact, samples));
          ++r.cases;
        }
    }
    r.detail = fmt::format("q=0.5, t<=10, {} samples, 3 paths x 9 cut pairs", samples);
  });
}

CheckResult check_png_exact(CheckScale) {
  return timed("PNG single point, splitting, fixed-time vs space-like", 1.0, [&](CheckResult& r) {
    const PNGObservation one{{{0.0, 1.0}}, {0}};
    const double e2 = std::exp(-2.0);
    const double single = std::max(std::abs(joint_prob_png(one) / e2 - 1.0),
                                   std::abs(joint_prob_png(one, PNGKernel::fixed_time(1.0)) / e2 - 1.0));
    double split = 0.0;
    for (double t : {0.4, 0.7})
      for (double gap : {2.2, 3.0})
        for (int h1 : {0, 1, 2})
          for (int h2 : {0, 2}) {
            const double x2 = gap * t;  // |x2 - x1| > 2t
            const double joint = joint_prob_png(PNGObservation{{{0.0, t}, {x2, t}}, {h1, h2}});
            const double prod =
                joint_prob_png(PNGObservation{{{0.0, t}}, {h1}}) * joint_prob_png(PNGObservation{{{x2, t}}, {h2}});
            split = std::max(split, std::abs(joint - prod));
            ++r.cases;
          }
    double kernels = 0.0;
    for (double t : {0.4, 1.0, 1.7})
      for (double dx : {-1.5, -0.6, 0.0, 0.3, 1.2, 2.9})
        for (int h1 = -2; h1 <= 5; ++h1)
          for (int h2 = -2; h2 <= 5; ++h2) {
            const double a = K_png_fixed_time(t, 0.2, h1, 0.2 + dx, h2);
            const double b = K_png_spacelike({0.2, t}, h1, {0.2 + dx, t}, h2);
            kernels = std::max(kernels, std::abs(a - b) / std::max(1.0, std::abs(a)));
            ++r.cases;
          }
    // each deviation relative to its own tolerance
    r.worst = std::max({single / 1e-6, split / 1e-10, kernels / 1e-12});
    r.detail = fmt::format("e^-2 rel {:.2e} (tol 1e-6); splitting {:.2e} (tol 1e-10); kernels {:.2e} (tol 1e-12)", single,
                           split, kernels);
  });
}

double small_q_discrepancy(double q) {
  struct Probe {
    double x, t;
    int H;
  };
  std::vector<Probe> probes;
  for (double t : {0.4, 0.5})
    for (double x : {-0.1, 0.0, 0.1})
      for (int H : {0, 2}) probes.push_back({x, t, H});
  const double s = std::sqrt(q);
  const ModelParams mp{q};
  double worst = 0.0;
  for (const Probe& a : probes)
    for (const Probe& b : probes) {
      const double dx = b.x - a.x, dt = a.t - b.t;
      if (std::abs(dt) > std::abs(dx) + 1e-12) continue;
      // both kernels jump on the light-cone boundaries
      if (dx != 0.0 && std::abs(std::abs(dx) - std::abs(dt)) < 1e-9) continue;
      if (std::abs(std::abs(dx) - (a.t + b.t)) < 1e-9) continue;
      if (dx == 0.0 && dt == 0.0 && a.H != b.H) continue;
      const SpaceTimePoint d1{static_cast<int>(std::lround((a.t + a.x) / s - a.H / 2.0)),
                              static_cast<int>(std::lround(2 * a.t / s))};
      const SpaceTimePoint d2{static_cast<int>(std::lround((b.t + b.x) / s - b.H / 2.0)),
                              static_cast<int>(std::lround(2 * b.t / s))};
      for (int h1 = a.H; h1 <= a.H + 2; ++h1)
        for (int h2 = b.H; h2 <= b.H + 2; ++h2) {
          const int x1 = static_cast<int>(std::lround(-2 * a.x / s)) + a.H - h1;
          const int x2 = static_cast<int>(std::lround(-2 * b.x / s)) + b.H - h2;
          const double discrete = K_flat_conjugated(d1, d2, x1, x2, mp);
          worst = std::max(worst, std::abs(discrete - K_png_spacelike({a.x, a.t}, h1, {b.x, b.t}, h2)));
        }
    }
  return worst;
}

CheckResult check_small_q_limit(double q, double tolerance) {
  return timed(fmt::format("discrete kernel at q={:g} vs PNG kernel", q), tolerance, [&](CheckResult& r) {
    r.worst = small_q_discrepancy(q);
    r.cases = 1;
    r.detail = "t in {0.4, 0.5}, x in {-0.1, 0, 0.1}, H in {0, 2}, heights H..H+2";
  });
}

CheckResult check_small_q_rate() {
  return timed("discrete-to-PNG kernel gap shrinks like sqrt(q)", 2e-3, [&](CheckResult& r) {
    const double coarse = small_q_discrepancy(1e-4), fine = small_q_discrepancy(1e-6);
    r.worst = fine;
    r.cases = 2;
    r.detail = fmt::format("q=1e-4: {:.3e}, q=1e-6: {:.3e}, ratio {:.3f}", coarse, fine, fine / coarse);
    if (!(fine < 0.2 * coarse)) r.detail += " FAILED ratio";
  });
}

CheckResult check_airy_consistency(CheckScale) {
  return timed("Airy1 determinant: panel orders 10 vs 16, monotone cuts", 1e-6, [&](CheckResult& r) {
    AiryOptions coarse;
    coarse.panel_order = 10;
    const std::vector<double> svals{-1.0, 0.0, 1.0};
    for (double s : svals) {
      const AiryObservation obs{{0.0}, {s}};
      r.worst = std::max(r.worst, std::abs(joint_prob_airy1(obs) - joint_prob_airy1(obs, coarse)));
      ++r.cases;
    }
    for (const auto& taus : {std::vector<double>{0.0, 0.5}, std::vector<double>{-0.3, 0.4}})
      for (double s1 : svals)
        for (double s2 : svals) {
          const AiryObservation obs{taus, {s1, s2}};
          r.worst = std::max(r.worst, std::abs(joint_prob_airy1(obs) - joint_prob_airy1(obs, coarse)));
          ++r.cases;
        }
    int violations = 0;
    const std::vector<double> grid{-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0};
    for (double fixed : {-0.5, 0.5})
      for (int k = 0; k < 2; ++k) {
        double prev = -1.0;
        for (double s : grid) {
          const AiryObservation obs{{0.0, 0.5}, k == 0 ? std::vector<double>{s, fixed} : std::vector<double>{fixed, s}};
          const double v = joint_prob_airy1(obs);
          if (v < prev - 1e-10) ++violations;
          prev = v;
          ++r.cases;
        }
      }
    r.detail = fmt::format("m<=2, s in {{-1,0,1}}; {} monotonicity violations", violations);
    if (violations) r.detail += " FAILED";
  });
}

CheckResult check_lemma_suite() {
  return timed("determinant and Vandermonde lemmas", 0.0, [&](CheckResult& r) {
    std::vector<std::string> failed;
    for (const auto& c : lemma_suite()) {
      ++r.cases;
      if (!c.passed) failed.push_back(c.name);
    }
    r.worst = static_cast<double>(failed.size());
    r.detail = fmt::format("{} checks", r.cases);
    for (const auto& f : failed) r.detail += " FAILED " + f;
  });
}

CheckResult check_scaling_identities() {
  return timed("scaling coefficient identities", 1e-12, [&](CheckResult& r) {
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.95})
      for (double slope : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        SpaceLikePathSpec p;
        p.pi = [slope](double th) { return 1.0 + slope * th; };
        p.pi_prime = slope;
        p.pi_second = 0.0;
        const auto c = scaling_coeffs(p, q);
        const double sq = std::sqrt(q);
        r.worst = std::max(r.worst, std::abs(std::cbrt(c.kappa2) * sq / (1 + sq) - c.kappa_v));
        r.worst = std::max(r.worst, std::abs(std::pow(c.kappa2, 2.0 / 3.0) * q / c.kappa1 - c.kappa_h));
        ++r.cases;
      }
    const auto ft = scaling_coeffs(SpaceLikePathSpec::fixed_time(), 0.25);
    r.worst = std::max(r.worst, std::abs(ft.kappa_v - std::cbrt(3.0 / 8.0)));
    r.detail = "(q, slope) grid of 25";
  });
}

CheckResult check_special_functions() {
  return timed("Bessel recurrence, drifted Bessel and Airy cross-checks", 1e-9, [&](CheckResult& r) {
    auto note = [&](double dev) {
      r.worst = std::max(r.worst, dev);
      ++r.cases;
    };
    for (int n = 1; n <= 15; ++n)
      for (double x : {1.0, 5.0, 10.0})
        note(std::abs(bessel(BesselKind::J, n - 1, x) + bessel(BesselKind::J, n + 1, x) -
                      2.0 * n / x * bessel(BesselKind::J, n, x)));
    for (int n : {-3, 0, 2, 7})
      for (double x : {0.5, 3.0, 9.0}) {
        note(std::abs(bessel(BesselKind::J, n, x) - bessel_series(BesselKind::J, n, x)));
        const double iv = bessel(BesselKind::I, n, x);
        note(std::abs(iv - bessel_series(BesselKind::I, n, x)) / std::max(1.0, iv));
      }
    for (int n : {-2, 0, 2, 5})
      for (double a : {-0.7, 0.4, 1.1})
        for (double b : {1.5, 2.5}) {
          note(std::abs(drifted_bessel(BesselKind::J, n, a, b) - drifted_bessel_closed_form(BesselKind::J, n, a, b)));
          const double iv = drifted_bessel_closed_form(BesselKind::I, n, b, a);
          note(std::abs(drifted_bessel(BesselKind::I, n, b, a) - iv) / std::max(1.0, std::abs(iv)));
        }
    for (double a : {-1.0, 0.0, 0.5, 2.0})
      for (double b : {-2.0, 0.3, 3.0}) {
        const double closed = airy_combination(a, b);
        note(std::abs(closed - airy_combination_contour(a, b)) / std::max(1.0, std::abs(closed)));
      }
    r.detail = "three-term recurrence, series, closed forms, Airy quadrature";
  });
}

std::vector<CheckResult> run_selftest(int threads) {
  std::vector<CheckResult> out;
  out.push_back(check_lemma_suite());
  out.push_back(check_transition_formula(CheckScale::Quick));
  out.push_back(check_signed_marginal(CheckScale::Quick));
  out.push_back(check_initial_condition(CheckScale::Quick));
  out.push_back(check_F_identities(CheckScale::Quick));
  out.push_back(check_orthonormality(CheckScale::Quick));
  out.push_back(check_kernel_forms(CheckScale::Quick));
  out.push_back(check_tasep_monte_carlo(CheckScale::Quick, 2024, threads));
  out.push_back(check_png_exact(CheckScale::Quick));
  out.push_back(check_small_q_rate());
  out.push_back(check_airy_consistency(CheckScale::Quick));
  out.push_back(check_scaling_identities());
  out.push_back(check_special_functions());
  return out;
}

std::string format_check(const CheckResult& r) {
  return fmt::format("{} {}: worst {:.3e} (tol {:.1e}, {} cases, {:.1f} s) {}", r.passed ? "PASS" : "FAIL", r.name,
                     r.worst, r.tolerance, r.cases, r.seconds, r.detail);
}

}  // namespace kpz
