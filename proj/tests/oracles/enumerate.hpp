#pragma once
// Exhaustive evolution of a finite block of TASEP particles, tracking which observation events occurred.

#include <map>
#include <utility>
#include <vector>

#include "kpz/tasep_kernels.hpp"

namespace oracle {

// P(x_{n_k}(t_k) >= a_k for all k). Labels n_min - t_max .. n_max suffice for the alternating
// start; half_infinite clips the block at label 1 (the first particle is then genuinely free).
inline double joint_probability(const std::vector<kpz::SpaceTimePoint>& pts, const std::vector<int>& cuts, double q,
                                bool half_infinite) {
  int n_max = pts[0].n, lead = pts[0].n - pts[0].t, t_max = 0;
  for (const auto& p : pts) {
    n_max = std::max(n_max, p.n);
    lead = std::min(lead, p.n - p.t);
    t_max = std::max(t_max, p.t);
  }
  if (half_infinite) lead = std::max(lead, 1);
  const int count = n_max - lead + 1;
  std::vector<int> start(count);
  for (int i = 0; i < count; ++i) start[i] = -2 * (lead + i);

  auto mark = [&](const std::vector<int>& pos, int t, unsigned seen) {
    for (std::size_t k = 0; k < pts.size(); ++k)
      if (pts[k].t == t && pos[pts[k].n - lead] >= cuts[k]) seen |= 1u << k;
    return seen;
  };
  using State = std::pair<std::vector<int>, unsigned>;
  std::map<State, double> dist{{{start, mark(start, 0, 0)}, 1.0}};
  for (int t = 1; t <= t_max; ++t) {
    std::map<State, double> next;
    for (const auto& [state, pr] : dist) {
      const auto& pos = state.first;
      for (unsigned m = 0; m < (1u << count); ++m) {
        double w = pr;
        std::vector<int> moved = pos;
        for (int i = 0; i < count && w != 0.0; ++i) {
          const bool free = i == 0 || pos[i - 1] != pos[i] + 1;
          const bool hop = (m >> i) & 1u;
          if (!free) {
            if (hop) w = 0.0;
            continue;
          }
          w *= hop ? 1.0 - q : q;
          if (hop) ++moved[i];
        }
        if (w != 0.0) next[{moved, mark(moved, t, state.second)}] += w;
      }
    }
    dist = std::move(next);
  }
  const unsigned all = (1u << pts.size()) - 1;
  double total = 0.0;
  for (const auto& [state, pr] : dist)
    if (state.second == all) total += pr;
  return total;
}

}  // namespace oracle
