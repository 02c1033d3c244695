#pragma once

#include <cstdint>
#include <vector>

#include "kpz/contour.hpp"

namespace kpz {

struct ModelParams {
  double q = 0.5;
  double p() const { return 1.0 - q; }
  void validate() const;
  static ModelParams from_q(double q);
};

struct SpaceTimePoint {
  int n = 1;
  int t = 0;
  bool operator==(const SpaceTimePoint&) const = default;
};

struct ObservationPath {
  std::vector<SpaceTimePoint> points;
  std::vector<int> cuts;
  void validate() const;
};

struct InitialCondition {
  enum class Kind { AlternatingInfinite, FiniteList };
  Kind kind = Kind::AlternatingInfinite;
  std::vector<int> y;  // strictly decreasing, FiniteList only
  void validate() const;
  int position(int label) const;  // y_label
};

// (n1,t1) ≺ (n2,t2)
bool precedes(const SpaceTimePoint& a, const SpaceTimePoint& b);

// F_n(x,t), signed index n
double F(int n, int x, int t, const ModelParams& params);

double phi_sharp(int x, int y, const ModelParams& params);

// Γ₋₁ integral with (-w)^{n1-n2}; no ≺ indicator
double phi_pair(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2, const ModelParams& params);

// Γ₀,₋₁ integral with w^{n1-n2}, times the ≺ indicator
double phi_star(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2, const ModelParams& params);

// Γ₀ part of phi_star: (1/2πi)∮ z^{n1-n2} (1+pz)^{(t1-t2)-(n1-n2)} (1+z)^{(x2-x1)+(n2-n1)-1}
double phi_star_origin_part(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                            const ModelParams& params);

double Psi(int n, int t, int j, int x, const ModelParams& params);
double Phi(int n, int t, int j, int x, const ModelParams& params);

// Σ_x Ψ_j^{n,t}(x) Φ_k^{n,t}(x). When t < j the tail of Ψ is a polynomial times (-p/q)^x and the
// sum is taken as the analytic continuation of the geometric series (ordinary sum when q > 1/2).
double psi_phi_pairing(int n, int t, int j, int k, const ModelParams& params);

// K̃ of the flat kernel (Γ₀ integral)
double K_flat_tilde(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2, const ModelParams& params);
double K_flat(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2, const ModelParams& params);

// double-contour part of the half-infinite (particles 1, 2, ...) kernel
double K_finiteN_double(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                        const ModelParams& params);
double K_finiteN(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2, const ModelParams& params,
                 int N);
// Σ_{k=1}^{n2} Ψ^{n1,t1}_{n1-k}(x1) Φ^{n2,t2}_{n2-k}(x2) - phi_star; equals K_finiteN for comparable points
double K_finiteN_sum_form(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                          const ModelParams& params);

struct FiniteNRadii {
  double z_radius;  // Γ₀
  double w_radius;  // Γ₋₁
};
FiniteNRadii finiteN_radii(const ModelParams& params);

double conjugate_factor(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                        const ModelParams& params);

// q^{(x1-x2)/2} q^{n1-n2} q^{-(t1-t2)/2}, the conjugation used for the q → 0 limit
double png_conjugate_factor(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                            const ModelParams& params);

// png_conjugate_factor · K_flat evaluated in the rescaled variables w = -1 + √q z (φ part) and
// z = -w/(w+√q) (K̃ part), which stay well scaled as q → 0
double K_flat_conjugated(const SpaceTimePoint& p1, const SpaceTimePoint& p2, int x1, int x2,
                         const ModelParams& params);

struct Radii {
  double gamma0;
  double gamma_m1;
  double gamma0_m1;
};
Radii default_radii(const ModelParams& params);

}  // namespace kpz
