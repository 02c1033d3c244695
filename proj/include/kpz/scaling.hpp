#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kpz/dynamics.hpp"
#include "kpz/fredholm.hpp"
#include "kpz/png_kernels.hpp"
#include "kpz/tasep_kernels.hpp"

namespace kpz {

// θ ↦ (π(θ), θ) parametrises the macroscopic observation line (n, t) = ((π-θ)T, (π+θ)T).
struct SpaceLikePathSpec {
  std::function<double(double)> pi;
  double theta = 0.0;
  std::optional<double> pi_prime;        // π'(θ)
  std::optional<double> pi_second;       // π''(θ)
  double fd_step = 1e-5;

  double value() const;
  double d1() const;
  double d2() const;
  void validate() const;  // |π'| <= 1, π + θ > 0

  static SpaceLikePathSpec fixed_time();                         // π = 1 - θ at θ = 0
  static SpaceLikePathSpec tagged_particle(double alpha, double theta = 0.0);  // π = α + θ
};

struct ScalingParams {
  double q = 0.5;
  double v = 0.0;
  double kappa_v = 0.0, kappa_h = 0.0;
  double kappa1 = 0.0, kappa2 = 0.0;
  double S_v = 0.0, S_h = 0.0;
};

struct TasepObservation {
  SpaceTimePoint point;
  double reference = 0.0;  // -2n + v t
  double T = 0.0;
  // (x - reference) / (-T^{1/3})
  double rescale(int position) const;
};

TasepObservation tasep_observation(const SpaceLikePathSpec& spec, double q, double T, double u);
ScalingParams scaling_coeffs(const SpaceLikePathSpec& spec, double q);

struct PNGPathSpec {
  double gamma0 = 1.0, gamma1 = 0.0, gamma2 = 0.0;  // γ(0), γ'(0), γ''(0)
  static PNGPathSpec fixed_time() { return {}; }
};

struct PNGScaledObservation {
  PNGPoint point;
  double T = 0.0;
  // (h - 2t) / T^{1/3}
  double rescale(int height) const;
};

PNGScaledObservation png_observation(const PNGPathSpec& gamma, double T, double u);
ScalingParams png_scaling(const PNGPathSpec& gamma);

enum class ExperimentKind { Tasep, PNG };

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Tasep;
  SpaceLikePathSpec path = SpaceLikePathSpec::fixed_time();
  double q = 0.5;
  PNGPathSpec gamma;
  std::vector<double> T_list;
  std::vector<double> u_list{0.0};
  std::vector<double> s_grid;
  std::int64_t samples = 10000;
  RngSpec rng;
  int threads = 1;
  AiryOptions airy;
  // Airy₁ CDF tabulation range and spacing, in units of A₁ itself
  double table_lo = -6.0, table_hi = 5.0, table_step = 0.02;
};

struct ConvergenceRow {
  double T, u, s, empirical, exact, ks;
};

struct ConvergenceCell {
  double T, u;
  SpaceTimePoint tasep_point;  // TASEP only
  PNGPoint png_point;          // PNG only
  std::int64_t samples;
  double ks, band;
};

struct ConvergenceReport {
  ExperimentKind kind;
  ScalingParams scaling;
  std::vector<ConvergenceRow> rows;
  std::vector<ConvergenceCell> cells;
  // for each u and consecutive T: ks(T_next) < ks(T_prev) + 2·band(T_next)
  bool monotone = true;
  double seconds = 0.0;

  std::string csv() const;
  std::string json_summary() const;
};

ConvergenceReport convergence_experiment(const ExperimentSpec& spec);

// Rough wall-clock estimate in seconds on one core.
double estimate_runtime(const ExperimentSpec& spec);

}  // namespace kpz
