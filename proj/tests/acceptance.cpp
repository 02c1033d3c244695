// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status counts failures, except criteria named with --allow-fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "kpz/checks.hpp"
#include "kpz/contour.hpp"
#include "kpz/scaling.hpp"
#include "oracles/series.hpp"

using namespace kpz;

namespace {

// Bessel and drifted-Bessel contour values, and the Airy combination, against long-double series
CheckResult special_functions_vs_series() {
  CheckResult r;
  r.name = "Bessel, drifted Bessel and Airy identities vs series";
  r.tolerance = 1e-9;
  const auto start = std::chrono::steady_clock::now();
  auto note = [&](double dev) {
    r.worst = std::max(r.worst, dev);
    ++r.cases;
  };
  for (int n : {-5, -1, 0, 1, 4, 9, 17})
    for (double x : {0.5, 2.0, 7.5, 11.0}) {
      note(std::abs(bessel(BesselKind::J, n, x) - double(oracle::J(n, x))));
      const double iv = double(oracle::I(n, x));
      note(std::abs(bessel(BesselKind::I, n, x) - iv) / std::max(1.0, iv));
    }
  for (int n : {-2, 0, 2, 5})
    for (double a : {-0.7, 0.4, 1.1})
      for (double b : {1.5, 2.5}) {
        const double arg = 2.0 * std::sqrt(b * b - a * a);
        const double ratio = std::pow((b + a) / (b - a), 0.5 * n);
        note(std::abs(drifted_bessel(BesselKind::J, n, a, b) - ratio * double(oracle::J(n, arg))));
        const double iv = ratio * double(oracle::I(n, arg));
        note(std::abs(drifted_bessel(BesselKind::I, n, b, a) - iv) / std::max(1.0, iv));
      }
  for (double a : {-1.0, 0.0, 0.5, 1.0, 2.0})
    for (double b : {-2.0, 0.0, 0.3, 1.0, 3.0}) {
      const double expect = double(oracle::airy_ai(a * a - b)) * std::exp(2.0 * a * a * a / 3.0 - a * b);
      const double scale = std::max(1.0, std::abs(expect));
      note(std::abs(airy_combination(a, b) - expect) / scale);
      note(std::abs(airy_combination_contour(a, b) - expect) / scale);
    }
  r.passed = r.worst <= r.tolerance;
  r.detail = "Bessel orders -5..17, 24 drifted points, 25 Airy points";
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

CheckResult convergence(int threads, std::int64_t tasep_samples, std::int64_t png_samples) {
  CheckResult r;
  r.name = "KS distance to the Airy1 marginal is nonincreasing in T";
  r.tolerance = 0.0;
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> s_grid;
  for (int i = -12; i <= 8; ++i) s_grid.push_back(0.25 * i);

  ExperimentSpec tasep;
  tasep.kind = ExperimentKind::Tasep;
  tasep.q = 0.5;
  tasep.T_list = {500.0, 2000.0};
  tasep.s_grid = s_grid;
  tasep.samples = tasep_samples;
  tasep.rng = {20240601, 0};
  tasep.threads = threads;
  const auto tr = convergence_experiment(tasep);

  ExperimentSpec png = tasep;
  png.kind = ExperimentKind::PNG;
  png.T_list = {200.0, 800.0};
  png.samples = png_samples;
  png.rng = {20240602, 0};
  const auto pr = convergence_experiment(png);

  r.passed = tr.monotone && pr.monotone;
  r.worst = r.passed ? 0.0 : 1.0;
  r.cases = tr.cells.size() + pr.cells.size();
  auto describe = [](const ConvergenceReport& rep) {
    std::string s;
    for (const auto& c : rep.cells) s += fmt::format(" T={:g}: KS {:.4f} band {:.4f};", c.T, c.ks, c.band);
    return s;
  };
  r.detail = fmt::format("TASEP q=0.5 ({} samples):{} PNG ({} samples):{}", tasep_samples, describe(tr), png_samples,
                         describe(pr));
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::set<int> allow_fail;
  std::set<int> only;
  int threads = 1;
  std::int64_t tasep_samples = 100000, png_samples = 2000;
  app.add_option("--allow-fail", allow_fail, "criteria whose failure does not affect the exit status");
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--threads", threads);
  app.add_option("--tasep-samples", tasep_samples);
  app.add_option("--png-samples", png_samples);
  CLI11_PARSE(app, argc, argv);

  struct Criterion {
    int id;
    std::function<CheckResult()> run;
  };
  const std::vector<Criterion> criteria{
      {1, [] { return check_transition_formula(CheckScale::Full); }},
      {2, [] { return check_signed_marginal(CheckScale::Full); }},
      {3, [] { return check_initial_condition(CheckScale::Full); }},
      {4, [] { return check_F_identities(CheckScale::Full); }},
      {5, [] { return check_orthonormality(CheckScale::Full); }},
      {6, [] { return check_kernel_forms(CheckScale::Full); }},
      {7, [&] { return check_tasep_monte_carlo(CheckScale::Full, 2024, threads); }},
      {8, [] { return check_png_exact(CheckScale::Full); }},
      {9,
       [] {
         auto r = check_small_q_limit(1e-4, 2e-3);
         if (!r.passed) r.detail += "; gap is O(sqrt q), see README";
         return r;
       }},
      {10, [] { return check_airy_consistency(CheckScale::Full); }},
      {11, [&] { return convergence(threads, tasep_samples, png_samples); }},
      {12, [] { return special_functions_vs_series(); }},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const CheckResult r = c.run();
    std::printf("[%2d] %s\n", c.id, format_check(r).c_str());
    std::fflush(stdout);
    if (!r.passed && !allow_fail.count(c.id)) ++unexpected;
  }
  return unexpected;
}
