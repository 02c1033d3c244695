#include "kpz/stats.hpp"

#include <algorithm>
#include <cmath>

#include "kpz/error.hpp"

namespace kpz {

EmpiricalCDF::EmpiricalCDF(std::vector<double> values) : sorted_(std::move(values)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCDF::operator()(double s) const {
  if (sorted_.empty()) return 0.0;
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), s);
  return static_cast<double>(it - sorted_.begin()) / sorted_.size();
}

double EmpiricalCDF::below(double s) const {
  if (sorted_.empty()) return 0.0;
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), s);
  return static_cast<double>(it - sorted_.begin()) / sorted_.size();
}

double ks_distance(const EmpiricalCDF& empirical, const std::function<double(double)>& cdf) {
  const auto& v = empirical.sorted();
  if (v.empty()) throw Error(ErrorKind::DomainError, "KS distance of an empty sample");
  const double n = static_cast<double>(v.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const double f = cdf(v[i]);
    worst = std::max({worst, std::abs(j / n - f), std::abs(i / n - f)});
    i = j;
  }
  return worst;
}

double dkw_band(std::int64_t samples, double confidence) {
  if (samples <= 0) throw Error(ErrorKind::DomainError, "DKW band needs samples");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(samples)));
}

double binomial_z(double empirical, double exact, std::int64_t samples) {
  const double var = exact * (1.0 - exact) / static_cast<double>(samples);
  const double diff = std::abs(empirical - exact);
  if (var <= 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / std::sqrt(var);
}

TabulatedCDF::TabulatedCDF(double lo, double hi, std::vector<double> values)
    : lo_(lo), hi_(hi), values_(std::move(values)) {
  if (values_.size() < 2 || !(hi > lo)) throw Error(ErrorKind::DomainError, "table needs two nodes");
  step_ = (hi - lo) / (values_.size() - 1);
}

double TabulatedCDF::operator()(double s) const {
  if (s <= lo_) return values_.front();
  if (s >= hi_) return values_.back();
  const double pos = (s - lo_) / step_;
  const std::size_t i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double frac = pos - i;
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

}  // namespace kpz
