#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kpz {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // largest deviation seen (|z| for Monte Carlo checks)
  double tolerance = 0.0;
  std::size_t cases = 0;
  std::string detail;
  double seconds = 0.0;
};

enum class CheckScale { Quick, Full };

// Determinantal transition probability vs exhaustive enumeration over every reachable configuration.
CheckResult check_transition_formula(CheckScale scale);
// Signed-measure marginal vs the determinantal transition probability.
CheckResult check_signed_marginal(CheckScale scale);
// Transition determinant at t = 0 is the Kronecker delta.
CheckResult check_initial_condition(CheckScale scale, std::uint64_t seed = 11);
// Recurrences, convolution, partial sums, vanishing and special values of F_n(x,t).
CheckResult check_F_identities(CheckScale scale);
CheckResult check_orthonormality(CheckScale scale);
// finite-N kernel: double-contour vs sum form, and vs the flat kernel left of the starting sites
CheckResult check_kernel_forms(CheckScale scale, std::uint64_t seed = 23);
// Two-point Fredholm determinants vs word-parallel Monte Carlo, binomial z-scores.
CheckResult check_tasep_monte_carlo(CheckScale scale, std::uint64_t seed = 2024, int threads = 1);
CheckResult check_png_exact(CheckScale scale);
// worst |conjugated discrete kernel - PNG kernel| at the given q on a grid of small (x, t, h)
double small_q_discrepancy(double q);
CheckResult check_small_q_limit(double q, double tolerance);
// discrepancy shrinks like √q: value at 1e-6 is under 2e-3 and under a fifth of the value at 1e-4
CheckResult check_small_q_rate();
CheckResult check_airy_consistency(CheckScale scale);
CheckResult check_lemma_suite();
CheckResult check_scaling_identities();
// recurrence, series and closed-form cross-checks of the Bessel and Airy evaluations
CheckResult check_special_functions();

std::vector<CheckResult> run_selftest(int threads = 1);

std::string format_check(const CheckResult& r);

}  // namespace kpz
