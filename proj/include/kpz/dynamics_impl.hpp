#pragma once

#include <map>
#include <vector>

#include "kpz/error.hpp"

namespace kpz {

template <class Scalar>
std::map<std::vector<int>, Scalar> transition_law(const std::vector<int>& y, int t, const Scalar& q) {
  const int n = static_cast<int>(y.size());
  if (n > 6 || t > 6) throw Error(ErrorKind::TooLarge, "enumeration limited to N <= 6 and t <= 6");
  if (t < 0) throw Error(ErrorKind::DomainError, "time must be nonnegative");
  const Scalar p = Scalar(1) - q;
  std::map<std::vector<int>, Scalar> law{{y, Scalar(1)}};
  for (int s = 0; s < t; ++s) {
    std::map<std::vector<int>, Scalar> next;
    for (const auto& [z, weight] : law) {
      std::vector<int> free;
      for (int i = 0; i < n; ++i)
        if (i == 0 || z[i - 1] != z[i] + 1) free.push_back(i);
      const unsigned subsets = 1u << free.size();
      for (unsigned m = 0; m < subsets; ++m) {
        std::vector<int> x = z;
        Scalar w = weight;
        for (std::size_t k = 0; k < free.size(); ++k) {
          if ((m >> k) & 1u) {
            ++x[free[k]];
            w *= p;
          } else {
            w *= q;
          }
        }
        next[x] += w;
      }
    }
    law = std::move(next);
  }
  return law;
}

}  // namespace kpz
