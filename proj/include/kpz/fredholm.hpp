#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kpz/png_kernels.hpp"
#include "kpz/tasep_kernels.hpp"

namespace kpz {

// Per observation point either an integer interval [lo, hi] or a node set.
struct TruncationWindow {
  std::vector<int> lo, hi;                  // lattice case
  std::vector<std::vector<double>> nodes;   // continuum case
  double stability_tol = 1e-8;
  bool converged = false;
  int doublings = 0;
};

struct BlockIndex {
  int point;     // observation index
  double site;   // lattice site or quadrature node
};

struct BlockMatrix {
  std::vector<int> block_sizes;
  std::vector<BlockIndex> index;  // row/column -> (point, site)
  Eigen::MatrixXd data;
  void check() const;
};

// det(1 - M), partial-pivot LU
double determinant(const BlockMatrix& mat);
double determinant(const Eigen::MatrixXd& m);

enum class Conjugation { None, Standard, PNG };

struct FredholmOptions {
  double stability_tol = 1e-8;
  int threads = 1;
  Conjugation conjugation = Conjugation::Standard;
  int max_doublings = 12;
};

struct FredholmResult {
  double probability = 0.0;  // clamped to [0, 1]
  double raw = 0.0;          // determinant before clamping
  TruncationWindow window;
};

struct TasepKernel {
  enum class Kind { Flat, FiniteN };
  Kind kind = Kind::Flat;
  int N = 0;
  static TasepKernel flat() { return {}; }
  static TasepKernel finite(int N) { return {Kind::FiniteN, N}; }
};

// P(∩ x_{n_k}(t_k) ≥ a_k)
FredholmResult joint_prob_tasep_detailed(const ObservationPath& path, const ModelParams& params,
                                         TasepKernel kernel = TasepKernel::flat(), const FredholmOptions& opts = {});
double joint_prob_tasep(const ObservationPath& path, const ModelParams& params, TasepKernel kernel = TasepKernel::flat(),
                        const FredholmOptions& opts = {});

// Discrete growth model heights h_t(x) ≤ H, through the TASEP correspondence.
struct GrowthPoint {
  int x = 0;
  int t = 0;
  int H = 0;
};
FredholmResult joint_prob_growth_detailed(const std::vector<GrowthPoint>& points, const ModelParams& params,
                                          const FredholmOptions& opts = {});
double joint_prob_growth(const std::vector<GrowthPoint>& points, const ModelParams& params,
                         const FredholmOptions& opts = {});
// the equivalent TASEP observation path (labels shifted to be positive, duplicates merged)
ObservationPath growth_to_tasep_path(const std::vector<GrowthPoint>& points);

struct PNGKernel {
  enum class Kind { FixedTime, Spacelike };
  Kind kind = Kind::Spacelike;
  double t = 0.0;  // FixedTime only
  static PNGKernel fixed_time(double t) { return {Kind::FixedTime, t}; }
  static PNGKernel spacelike() { return {}; }
};

// P(∩ h(x_k, t_k) ≤ H_k)
FredholmResult joint_prob_png_detailed(const PNGObservation& obs, PNGKernel kernel = PNGKernel::spacelike(),
                                       const FredholmOptions& opts = {});
double joint_prob_png(const PNGObservation& obs, PNGKernel kernel = PNGKernel::spacelike(),
                      const FredholmOptions& opts = {});

struct AiryOptions {
  double length = 10.0;  // each factor truncated to [s_k, s_k + length]
  int panel_order = 16;  // Gauss–Legendre points per panel: 10 or 16
  int initial_panels = 4;
  double stability_tol = 1e-8;
  int max_doublings = 6;
};

// P(∩ A₁(τ_k) ≤ s_k)
FredholmResult joint_prob_airy1_detailed(const AiryObservation& obs, const AiryOptions& opts = {});
double joint_prob_airy1(const AiryObservation& obs, const AiryOptions& opts = {});

}  // namespace kpz
