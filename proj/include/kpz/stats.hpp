#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace kpz {

class EmpiricalCDF {
 public:
  EmpiricalCDF() = default;
  explicit EmpiricalCDF(std::vector<double> values);
  // fraction of samples <= s
  double operator()(double s) const;
  // fraction of samples < s
  double below(double s) const;
  std::size_t count() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

// sup_s |F_n(s) - F(s)| for continuous F, attained at the sample jumps
double ks_distance(const EmpiricalCDF& empirical, const std::function<double(double)>& cdf);

// Dvoretzky–Kiefer–Wolfowitz half-width: P(sup|F_n - F| > ε) <= 1 - confidence
double dkw_band(std::int64_t samples, double confidence = 0.99);

// |empirical - exact| / binomial standard deviation; 0 when both agree and the variance vanishes
double binomial_z(double empirical, double exact, std::int64_t samples);

// Piecewise-linear interpolant of a monotone table, clamped to the end values.
class TabulatedCDF {
 public:
  TabulatedCDF(double lo, double hi, std::vector<double> values);
  double operator()(double s) const;
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  double lo_, hi_, step_;
  std::vector<double> values_;
};

}  // namespace kpz
