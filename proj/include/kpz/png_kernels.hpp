#pragma once

#include <utility>
#include <vector>

namespace kpz {

struct PNGPoint {
  double x = 0.0;
  double t = 1.0;
};

struct PNGObservation {
  std::vector<PNGPoint> points;
  std::vector<int> cuts;  // H_k
  void validate() const;
};

struct AiryObservation {
  std::vector<double> taus;  // strictly increasing
  std::vector<double> cuts;  // s_k
  void validate() const;
};

// Fixed-time kernel from closed-form Bessel values
double K_png_fixed_time(double t, double x1, int h1, double x2, int h2);

// Space-like kernel from contour integrals of e^{Az + C/z}
double K_png_spacelike(const PNGPoint& p1, int h1, const PNGPoint& p2, int h2);

double K_airy1(double tau1, double xi1, double tau2, double xi2);

struct ThetaPi {
  double theta;
  double pi_value;
};
ThetaPi theta_pi_from_gamma(double gamma_value, double x);

}  // namespace kpz
