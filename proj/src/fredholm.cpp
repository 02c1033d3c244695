#include "kpz/fredholm.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "kpz/error.hpp"
#include "kpz/parallel.hpp"

namespace kpz {

void BlockMatrix::check() const {
  int total = 0;
  for (int s : block_sizes) total += s;
  if (data.rows() != total || data.cols() != total || static_cast<int>(index.size()) != total)
    throw Error(ErrorKind::IncompatibleInputs, "block sizes do not match the assembled matrix");
  if (!data.allFinite()) throw Error(ErrorKind::NumericalInconsistency, "kernel matrix has non-finite entries");
}

double determinant(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 1.0;
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m.rows(), m.cols()) - m;
  return a.partialPivLu().determinant();
}

double determinant(const BlockMatrix& mat) {
  mat.check();
  return determinant(mat.data);
}

namespace {

double checked_probability(double raw, const char* what) {
  if (!std::isfinite(raw) || raw < -1e-8 || raw > 1.0 + 1e-8)
    throw Error(ErrorKind::NumericalInconsistency,
                std::string(what) + " determinant " + std::to_string(raw) + " is not a probability");
  return std::clamp(raw, 0.0, 1.0);
}

// Lattice Fredholm determinant with windows [lo_k, hi_k]; entries are cached across window growth.
template <class Kernel>
class LatticeDeterminant {
 public:
  LatticeDeterminant(Kernel kernel, int threads) : kernel_(std::move(kernel)), threads_(threads) {}

  double operator()(const std::vector<int>& lo, const std::vector<int>& hi) {
    std::vector<BlockIndex> index;
    std::vector<int> sizes;
    for (std::size_t k = 0; k < lo.size(); ++k) {
      sizes.push_back(std::max(0, hi[k] - lo[k] + 1));
      for (int x = lo[k]; x <= hi[k]; ++x) index.push_back({static_cast<int>(k), static_cast<double>(x)});
    }
    const std::size_t n = index.size();
    std::vector<std::pair<std::size_t, std::size_t>> missing;
    Eigen::MatrixXd data(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const auto it = cache_.find(key(index[r], index[c]));
        if (it != cache_.end()) data(r, c) = it->second;
        else missing.push_back({r, c});
      }
    std::vector<double> values(missing.size());
    parallel_for(missing.size(), threads_, [&](std::size_t i) {
      const BlockIndex& a = index[missing[i].first];
      const BlockIndex& b = index[missing[i].second];
      values[i] = kernel_(a.point, static_cast<int>(a.site), b.point, static_cast<int>(b.site));
    });
    for (std::size_t i = 0; i < missing.size(); ++i) {
      data(missing[i].first, missing[i].second) = values[i];
      cache_.emplace(key(index[missing[i].first], index[missing[i].second]), values[i]);
    }
    BlockMatrix mat{sizes, std::move(index), std::move(data)};
    return determinant(mat);
  }

 private:
  static std::uint64_t key(const BlockIndex& a, const BlockIndex& b) {
    const auto pack = [](const BlockIndex& i) {
      return (static_cast<std::uint64_t>(i.point) << 24) ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(i.site) & 0xffffff);
    };
    return (pack(a) << 32) ^ pack(b);
  }

  Kernel kernel_;
  int threads_;
  std::unordered_map<std::uint64_t, double> cache_;
};

// Grows each window away from its fixed edge (downwards when `down`) until the determinant is stable.
// `bound` caps the growth where the kernel rows are known to vanish.
template <class Kernel>
FredholmResult grow_windows(Kernel kernel, std::vector<int> edge, std::vector<int> bound, bool down, int initial,
                            const FredholmOptions& opts, const char* what) {
  LatticeDeterminant<Kernel> det(std::move(kernel), opts.threads);
  const std::size_t m = edge.size();
  auto windows = [&](int width, std::vector<int>& lo, std::vector<int>& hi) {
    bool capped = true;
    lo.resize(m), hi.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      if (down) {
        hi[k] = edge[k];
        lo[k] = edge[k] - width + 1;
        if (lo[k] <= bound[k]) lo[k] = bound[k];
        else capped = false;
      } else {
        lo[k] = edge[k];
        hi[k] = edge[k] + width - 1;
        if (hi[k] >= bound[k]) hi[k] = bound[k];
        else capped = false;
      }
    }
    return capped;
  };
  FredholmResult result;
  result.window.stability_tol = opts.stability_tol;
  int width = std::max(initial, 1);
  std::vector<int> lo, hi;
  bool capped = windows(width, lo, hi);
  double value = det(lo, hi);
  for (int d = 0; !capped; ++d) {
    if (d >= opts.max_doublings)
      throw Error(ErrorKind::NonConvergent, std::string(what) + " window did not stabilise at width " +
                                                std::to_string(width));
    width *= 2;
    std::vector<int> lo2, hi2;
    capped = windows(width, lo2, hi2);
    const double next = det(lo2, hi2);
    const double change = std::abs(next - value);
    value = next;
    lo = lo2, hi = hi2;
    result.window.doublings = d + 1;
    if (change < opts.stability_tol) break;
  }
  result.window.lo = lo;
  result.window.hi = hi;
  result.window.converged = true;
  result.raw = value;
  result.probability = checked_probability(value, what);
  return result;
}

double conjugation(Conjugation c, const SpaceTimePoint& a, const SpaceTimePoint& b, int x, int y,
                   const ModelParams& params) {
  switch (c) {
    case Conjugation::None: return 1.0;
    case Conjugation::Standard: return conjugate_factor(a, b, x, y, params);
    case Conjugation::PNG: return png_conjugate_factor(a, b, x, y, params);
  }
  return 1.0;
}

}  // namespace

FredholmResult joint_prob_tasep_detailed(const ObservationPath& path, const ModelParams& params, TasepKernel kernel,
                                         const FredholmOptions& opts) {
  params.validate();
  path.validate();
  const auto& pts = path.points;
  int n_max = 0, t_max = 0;
  for (const auto& p : pts) n_max = std::max(n_max, p.n), t_max = std::max(t_max, p.t);
  if (kernel.kind == TasepKernel::Kind::FiniteN) {
    for (const auto& p : pts)
      if (p.n < 1 || p.n > kernel.N)
        throw Error(ErrorKind::OutOfRange, "finite-N kernel needs 1 <= n <= N, got n = " + std::to_string(p.n));
  }
  std::vector<int> edge, bound;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    edge.push_back(path.cuts[k] - 1);
    // flat kernel: rows with x <= -(n_k + n_max + 1) have no K̃ part and cannot change the determinant;
    // finite-N kernel rows vanish left of the starting site -2n_k
    bound.push_back(kernel.kind == TasepKernel::Kind::Flat ? -pts[k].n - n_max - 1 : -2 * pts[k].n);
  }
  // particle n never sits left of its starting site -2n
  bool empty = true;
  for (std::size_t k = 0; k < pts.size(); ++k)
    if (path.cuts[k] > -2 * pts[k].n) empty = false;
  if (empty) {
    FredholmResult r;
    r.probability = r.raw = 1.0;
    r.window.converged = true;
    r.window.stability_tol = opts.stability_tol;
    r.window.lo = r.window.hi = edge;
    return r;
  }
  const double p = params.p(), q = params.q;
  const int initial = static_cast<int>(20 + 8 * std::sqrt(t_max * p * q));
  auto entry = [&, conj = opts.conjugation](int i, int x, int j, int y) {
    const double c = conjugation(conj, pts[i], pts[j], x, y, params);
    if (kernel.kind == TasepKernel::Kind::Flat) return c * K_flat(pts[i], pts[j], x, y, params);
    return c * K_finiteN(pts[i], pts[j], x, y, params, kernel.N);
  };
  return grow_windows(entry, edge, bound, true, initial, opts, "TASEP");
}

double joint_prob_tasep(const ObservationPath& path, const ModelParams& params, TasepKernel kernel,
                        const FredholmOptions& opts) {
  return joint_prob_tasep_detailed(path, params, kernel, opts).probability;
}

ObservationPath growth_to_tasep_path(const std::vector<GrowthPoint>& points) {
  if (points.empty()) throw Error(ErrorKind::DomainError, "growth observation needs at least one point");
  // h_t(x) ≤ H  ⇔  x_n(t) ≥ x with n = ⌊(t - x - H)/2⌋
  std::map<std::pair<int, int>, int> cut;  // (n, -t) -> cut, sorted by n then decreasing t
  int n_min = std::numeric_limits<int>::max();
  std::vector<std::pair<SpaceTimePoint, int>> raw;
  for (const auto& g : points) {
    if (g.t < 0) throw Error(ErrorKind::DomainError, "growth time must be nonnegative");
    const int d = g.t - g.x - g.H;
    const int n = (d >= 0) ? d / 2 : -((-d + 1) / 2);
    raw.push_back({{n, g.t}, g.x});
    n_min = std::min(n_min, n);
  }
  // the flat system is invariant under n → n + s, x → x - 2s
  const int shift = 1 - n_min;
  for (auto& [pt, a] : raw) {
    const auto k = std::make_pair(pt.n + shift, -pt.t);
    const int c = a - 2 * shift;
    auto it = cut.find(k);
    if (it == cut.end()) cut.emplace(k, c);
    else it->second = std::max(it->second, c);
  }
  ObservationPath path;
  for (const auto& [k, c] : cut) {
    path.points.push_back({k.first, -k.second});
    path.cuts.push_back(c);
  }
  for (std::size_t k = 1; k < path.points.size(); ++k)
    if (!precedes(path.points[k - 1], path.points[k]))
      throw Error(ErrorKind::IncompatibleInputs, "growth points do not map onto a space-like TASEP path");
  return path;
}

FredholmResult joint_prob_growth_detailed(const std::vector<GrowthPoint>& points, const ModelParams& params,
                                          const FredholmOptions& opts) {
  return joint_prob_tasep_detailed(growth_to_tasep_path(points), params, TasepKernel::flat(), opts);
}

double joint_prob_growth(const std::vector<GrowthPoint>& points, const ModelParams& params,
                         const FredholmOptions& opts) {
  return joint_prob_growth_detailed(points, params, opts).probability;
}

FredholmResult joint_prob_png_detailed(const PNGObservation& obs, PNGKernel kernel, const FredholmOptions& opts) {
  obs.validate();
  const auto& pts = obs.points;
  double t_max = 0.0;
  for (const auto& p : pts) {
    t_max = std::max(t_max, p.t);
    if (kernel.kind == PNGKernel::Kind::FixedTime && p.t != kernel.t)
      throw Error(ErrorKind::IncompatibleInputs, "fixed-time PNG kernel needs all points at the kernel time");
  }
  std::vector<int> edge, bound;
  for (int H : obs.cuts) {
    edge.push_back(H + 1);
    bound.push_back(std::numeric_limits<int>::max() / 4);
  }
  const int initial = 16 + static_cast<int>(std::ceil(4.0 * t_max));
  auto entry = [&](int i, int h1, int j, int h2) {
    if (kernel.kind == PNGKernel::Kind::FixedTime) return K_png_fixed_time(kernel.t, pts[i].x, h1, pts[j].x, h2);
    return K_png_spacelike(pts[i], h1, pts[j], h2);
  };
  return grow_windows(entry, edge, bound, false, initial, opts, "PNG");
}

double joint_prob_png(const PNGObservation& obs, PNGKernel kernel, const FredholmOptions& opts) {
  return joint_prob_png_detailed(obs, kernel, opts).probability;
}

namespace {

// Gauss–Legendre nodes and weights on [-1, 1]
template <int N>
void legendre_rule(std::vector<double>& x, std::vector<double>& w) {
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& a = rule::abscissa();
  const auto& b = rule::weights();
  x.clear(), w.clear();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) {
      x.push_back(0.0), w.push_back(b[i]);
    } else {
      x.push_back(a[i]), w.push_back(b[i]);
      x.push_back(-a[i]), w.push_back(b[i]);
    }
  }
}

void composite_rule(int order, int panels, double a, double length, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  std::vector<double> x, w;
  if (order == 10) legendre_rule<10>(x, w);
  else if (order == 16) legendre_rule<16>(x, w);
  else if (order == 20) legendre_rule<20>(x, w);
  else throw Error(ErrorKind::ConfigError, "unsupported panel order " + std::to_string(order));
  nodes.clear(), weights.clear();
  const double h = length / panels;
  for (int p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < x.size(); ++i) {
      nodes.push_back(a + h * (p + 0.5 * (x[i] + 1.0)));
      weights.push_back(0.5 * h * w[i]);
    }
}

}  // namespace

FredholmResult joint_prob_airy1_detailed(const AiryObservation& obs, const AiryOptions& opts) {
  obs.validate();
  const std::size_t m = obs.taus.size();
  auto evaluate = [&](int panels, std::vector<std::vector<double>>& node_sets) {
    std::vector<std::vector<double>> weight_sets(m);
    node_sets.assign(m, {});
    std::vector<int> sizes;
    for (std::size_t k = 0; k < m; ++k) {
      composite_rule(opts.panel_order, panels, obs.cuts[k], opts.length, node_sets[k], weight_sets[k]);
      sizes.push_back(static_cast<int>(node_sets[k].size()));
    }
    BlockMatrix mat;
    mat.block_sizes = sizes;
    for (std::size_t k = 0; k < m; ++k)
      for (double v : node_sets[k]) mat.index.push_back({static_cast<int>(k), v});
    std::vector<double> sqrt_w;
    for (std::size_t k = 0; k < m; ++k)
      for (double w : weight_sets[k]) sqrt_w.push_back(std::sqrt(w));
    const std::size_t n = mat.index.size();
    mat.data.resize(n, n);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const auto& a = mat.index[r];
        const auto& b = mat.index[c];
        mat.data(r, c) = sqrt_w[r] * K_airy1(obs.taus[a.point], a.site, obs.taus[b.point], b.site) * sqrt_w[c];
      }
    return determinant(mat);
  };
  FredholmResult result;
  result.window.stability_tol = opts.stability_tol;
  int panels = std::max(opts.initial_panels, 1);
  std::vector<std::vector<double>> nodes;
  double value = evaluate(panels, nodes);
  for (int d = 0;; ++d) {
    if (d >= opts.max_doublings)
      throw Error(ErrorKind::NonConvergent, "Airy1 determinant did not stabilise at " + std::to_string(panels) + " panels");
    panels *= 2;
    const double next = evaluate(panels, nodes);
    const double change = std::abs(next - value);
    value = next;
    result.window.doublings = d + 1;
    if (change < opts.stability_tol) break;
  }
  result.window.nodes = nodes;
  result.window.converged = true;
  result.raw = value;
  result.probability = checked_probability(value, "Airy1");
  return result;
}

double joint_prob_airy1(const AiryObservation& obs, const AiryOptions& opts) {
  return joint_prob_airy1_detailed(obs, opts).probability;
}

}  // namespace kpz
