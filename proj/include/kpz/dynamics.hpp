#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "kpz/tasep_kernels.hpp"

namespace kpz {

struct ParticleConfig {
  std::vector<int> positions;  // x_1 > x_2 > ...
  int time = 0;
  void validate() const;
  bool operator==(const ParticleConfig&) const = default;
};

struct HeightProfile {
  std::vector<double> x;
  std::vector<int> h;
  double time = 0.0;
};

struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Engine for one (seed, stream, substream) triple; independent of thread count.
std::mt19937_64 make_engine(const RngSpec& rng, std::uint64_t substream = 0);

// 64 independent Bernoulli(p) bits from the binary expansion of p
std::uint64_t bernoulli_mask(std::mt19937_64& gen, double p);

// Observed labels [lo, hi]. The simulation adds `cushion` free-running labels to the right
// (default t_max); a smaller cushion raises WindowTooSmall unless the left end is the true leader.
struct LabelWindow {
  int lo = 1;
  int hi = 1;
  int cushion = -1;
};

// Configurations of labels lo..hi at times 0..t_max.
std::vector<ParticleConfig> simulate_tasep(const ModelParams& params, const InitialCondition& ic, const LabelWindow& window,
                                           int t_max, const RngSpec& rng);

// Alternating start; positions x_{n_k}(t_k) for each sample, 64 samples per word-parallel sweep.
// result[k][s] is the position of point k in sample s.
std::vector<std::vector<int>> sample_tasep_points(const ModelParams& params, const std::vector<SpaceTimePoint>& points,
                                                  std::int64_t samples, const RngSpec& rng, int threads = 1);

// Heights h_t(x) = t - x - 2m - 1, m = max{n : x_n(t) >= x}, so that h_t(x) <= H iff x_{⌊(t-x-H)/2⌋}(t) >= x.
int height_from_particles(const ParticleConfig& config, int first_label, int x);
std::vector<HeightProfile> simulate_growth(const ModelParams& params, int x_lo, int x_hi, int t_max, const RngSpec& rng);
// h_t(x) samples at the given sites and a single time, word-parallel like sample_tasep_points
std::vector<std::vector<int>> sample_growth_heights(const ModelParams& params, const std::vector<int>& sites, int t,
                                                    std::int64_t samples, const RngSpec& rng, int threads = 1);

// Continuous PNG, nucleations of intensity 2 started from a flat substrate.
struct Nucleation {
  double x, t;
};
std::vector<Nucleation> sample_nucleations(double t_max, double x_lo, double x_hi, std::mt19937_64& gen);
// longest chain of nucleations inside the backward light cone of (x, t)
int png_height(const std::vector<Nucleation>& points, double x, double t);
HeightProfile simulate_png(double t_max, double x_lo, double x_hi, const RngSpec& rng, int sites = 101);
// one-point heights h(x, t) for `samples` independent PNG realisations
std::vector<int> sample_png_heights(double x, double t, std::int64_t samples, const RngSpec& rng, int threads = 1);

// One parallel-update step z -> x: product of per-particle weights, leader free.
double step_weight(const std::vector<int>& z, const std::vector<int>& x, const ModelParams& params);
// The companion weight w̃(z, x) keyed on the arrival configuration.
double step_weight_tilde(const std::vector<int>& z, const std::vector<int>& x, const ModelParams& params);
// number of j with x_j - x_{j+1} = 1
int adjacent_pairs(const std::vector<int>& x);

// Exact law of the N-particle system after t steps from y, by enumeration. Scalar is double or a
// rational type; q is taken exactly as given.
template <class Scalar>
std::map<std::vector<int>, Scalar> transition_law(const std::vector<int>& y, int t, const Scalar& q);
double brute_force_transition(const ParticleConfig& y, const ParticleConfig& x, int t, const ModelParams& params);
// exact rational arithmetic on the binary value of q
std::map<std::vector<int>, double> brute_force_law(const ParticleConfig& y, int t, const ModelParams& params);

// q^{N(x)} det[F_{j-i}(x_{N-j+1} - y_{N-i+1}, t+j-i)]
double G_det(const ParticleConfig& y, const ParticleConfig& x, int t, const ModelParams& params);
// det[F_{j-i}(j-i, j-i)]_{n×n} = q^{1-n}
double D_block(int n, const ModelParams& params);
// Σ over the auxiliary variables of the signed measure with x_1^n = x_n pinned
double W_marginal(const ParticleConfig& y, const ParticleConfig& x, int t, const ModelParams& params);

struct LemmaCheck {
  std::string name;
  bool passed = false;
  double error = 0.0;
};
std::vector<LemmaCheck> lemma_suite(std::uint64_t seed = 1);

}  // namespace kpz

#include "kpz/dynamics_impl.hpp"
