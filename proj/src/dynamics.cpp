#include "kpz/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <functional>
#include <limits>

#include "kpz/error.hpp"
#include "kpz/parallel.hpp"

namespace kpz {

namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr int kLanes = 64;

int floor_div(int a, int b) { return a / b - ((a % b != 0) && ((a < 0) != (b < 0))); }

// Word-parallel TASEP from the alternating start: occ[i] bit l is site (offset + i) in lane l.
// Labels first..last are simulated; needed(s) is the smallest label whose time-s position must be exact.
struct WordSystem {
  int first, last, offset;
  std::vector<std::uint64_t> occ;

  WordSystem(int first_label, int last_label, int t_max) : first(first_label), last(last_label) {
    offset = -2 * last;
    const int right = -2 * first + t_max + 2;
    occ.assign(right - offset + 1, 0);
    for (int n = first; n <= last; ++n) occ[-2 * n - offset] = ~std::uint64_t{0};
  }

  // one step from time s, exact for labels >= keep (the label read but not moved is keep - 1)
  void step(int s, int keep, double p, std::mt19937_64& gen) {
    const int hi = std::min<int>(occ.size() - 2, -2 * keep + s + 1 - offset);
    const bool fair = p == 0.5;
    std::uint64_t right_old = occ[hi + 1];
    for (int i = hi; i >= 0; --i) {
      const std::uint64_t old = occ[i];
      const std::uint64_t movable = old & ~right_old;
      right_old = old;
      if (!movable) continue;
      const std::uint64_t hop = movable & (fair ? gen() : bernoulli_mask(gen, p));
      occ[i] = old & ~hop;
      occ[i + 1] |= hop;
    }
  }

  // positions of the particles with rank r (1 = rightmost simulated) in every lane
  void positions_of_ranks(const std::vector<int>& ranks, std::vector<std::array<int, kLanes>>& out) const {
    const int top = *std::max_element(ranks.begin(), ranks.end());
    std::array<int, kLanes> count{};
    out.assign(ranks.size(), {});
    int done = 0;
    for (int i = static_cast<int>(occ.size()) - 1; i >= 0 && done < kLanes; --i) {
      std::uint64_t w = occ[i];
      while (w) {
        const int l = std::countr_zero(w);
        w &= w - 1;
        const int c = ++count[l];
        for (std::size_t k = 0; k < ranks.size(); ++k)
          if (ranks[k] == c) out[k][l] = i + offset;
        if (c == top) ++done;
      }
    }
  }

  // number of particles at sites >= x in every lane
  std::array<int, kLanes> count_right_of(int x) const {
    std::array<int, kLanes> count{};
    for (int i = std::max(0, x - offset); i < static_cast<int>(occ.size()); ++i) {
      std::uint64_t w = occ[i];
      while (w) {
        ++count[std::countr_zero(w)];
        w &= w - 1;
      }
    }
    return count;
  }
};

template <class Body>
void for_each_batch(std::int64_t samples, int threads, Body&& body) {
  if (samples < 0) throw Error(ErrorKind::DomainError, "sample count must be nonnegative");
  const std::size_t batches = static_cast<std::size_t>((samples + kLanes - 1) / kLanes);
  parallel_for(batches, threads, [&](std::size_t b) {
    const int lanes = static_cast<int>(std::min<std::int64_t>(kLanes, samples - static_cast<std::int64_t>(b) * kLanes));
    body(b, lanes);
  });
}

Rational rational_det(std::vector<std::vector<Rational>> a) {
  const std::size_t n = a.size();
  Rational det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a[r][c] == 0) continue;
      const Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  return det;
}

Rational rational_pow(const Rational& base, int e) {
  Rational out = 1;
  const Rational b = e < 0 ? Rational(1) / base : base;
  for (int i = 0; i < std::abs(e); ++i) out *= b;
  return out;
}

double small_det(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 1.0;
  return m.partialPivLu().determinant();
}

// increasing tuples v[from..] in (low, high], v[from-1] fixed by the caller
void for_each_increasing(std::vector<int>& v, std::size_t from, int high, const std::function<void()>& body) {
  if (from == v.size()) {
    body();
    return;
  }
  for (int z = v[from - 1] + 1; z <= high; ++z) {
    v[from] = z;
    for_each_increasing(v, from + 1, high, body);
  }
}

}  // namespace

void ParticleConfig::validate() const {
  if (time < 0) throw Error(ErrorKind::DomainError, "configuration time must be nonnegative");
  for (std::size_t i = 1; i < positions.size(); ++i)
    if (!(positions[i] < positions[i - 1])) throw Error(ErrorKind::DomainError, "positions must strictly decrease");
}

std::mt19937_64 make_engine(const RngSpec& rng, std::uint64_t substream) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(rng.seed), hi(rng.seed), lo(rng.stream), hi(rng.stream), lo(substream), hi(substream)};
  return std::mt19937_64(seq);
}

std::uint64_t bernoulli_mask(std::mt19937_64& gen, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return ~std::uint64_t{0};
  // lane l is set iff its uniform bit string is below the binary expansion of p
  std::uint64_t result = 0, open = ~std::uint64_t{0};
  double rest = p;
  for (int bit = 0; bit < 60 && open && rest > 0.0; ++bit) {
    rest *= 2.0;
    const std::uint64_t r = gen();
    if (rest >= 1.0) {
      rest -= 1.0;
      result |= open & ~r;
      open &= r;
    } else {
      open &= ~r;
    }
  }
  return result;
}

std::vector<ParticleConfig> simulate_tasep(const ModelParams& params, const InitialCondition& ic, const LabelWindow& window,
                                           int t_max, const RngSpec& rng) {
  params.validate();
  ic.validate();
  if (t_max < 0) throw Error(ErrorKind::DomainError, "t_max must be nonnegative");
  if (window.hi < window.lo) throw Error(ErrorKind::DomainError, "empty label window");
  const bool finite = ic.kind == InitialCondition::Kind::FiniteList;
  if (finite && (window.lo < 1 || window.hi > static_cast<int>(ic.y.size())))
    throw Error(ErrorKind::OutOfRange, "label window outside the finite initial condition");
  const int cushion = window.cushion < 0 ? t_max : window.cushion;
  int lead = window.lo - cushion;
  if (finite) lead = std::max(lead, 1);
  const bool true_leader = finite && lead == 1;
  if (cushion < t_max && !true_leader)
    throw Error(ErrorKind::WindowTooSmall, "cushion of " + std::to_string(cushion) + " labels cannot shield " +
                                               std::to_string(t_max) + " steps");

  std::vector<int> pos;
  for (int n = lead; n <= window.hi; ++n) pos.push_back(ic.position(n));
  const std::size_t skip = window.lo - lead;
  auto snapshot = [&](int t) {
    return ParticleConfig{std::vector<int>(pos.begin() + skip, pos.end()), t};
  };
  std::vector<ParticleConfig> out{snapshot(0)};
  auto gen = make_engine(rng);
  std::bernoulli_distribution coin(params.p());
  std::vector<int> next(pos.size());
  for (int t = 1; t <= t_max; ++t) {
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const bool blocked = i > 0 && pos[i - 1] == pos[i] + 1;
      next[i] = pos[i] + (!blocked && coin(gen) ? 1 : 0);
    }
    pos.swap(next);
    out.push_back(snapshot(t));
  }
  return out;
}

std::vector<std::vector<int>> sample_tasep_points(const ModelParams& params, const std::vector<SpaceTimePoint>& points,
                                                  std::int64_t samples, const RngSpec& rng, int threads) {
  params.validate();
  if (points.empty()) throw Error(ErrorKind::DomainError, "no observation points");
  int first = std::numeric_limits<int>::max(), last = std::numeric_limits<int>::min(), t_max = 0;
  for (const auto& pt : points) {
    if (pt.t < 0) throw Error(ErrorKind::DomainError, "observation time must be nonnegative");
    first = std::min(first, pt.n - pt.t);
    last = std::max(last, pt.n);
    t_max = std::max(t_max, pt.t);
  }
  std::vector<std::vector<int>> out(points.size(), std::vector<int>(static_cast<std::size_t>(samples)));
  const double p = params.p();
  for_each_batch(samples, threads, [&](std::size_t b, int lanes) {
    auto gen = make_engine(rng, b);
    WordSystem sys(first, last, t_max);
    std::vector<std::array<int, kLanes>> found;
    auto record = [&](int t) {
      std::vector<int> ranks;
      std::vector<std::size_t> which;
      for (std::size_t k = 0; k < points.size(); ++k)
        if (points[k].t == t) ranks.push_back(points[k].n - first + 1), which.push_back(k);
      if (ranks.empty()) return;
      sys.positions_of_ranks(ranks, found);
      for (std::size_t r = 0; r < which.size(); ++r)
        for (int l = 0; l < lanes; ++l) out[which[r]][b * kLanes + l] = found[r][l];
    };
    record(0);
    for (int s = 0; s < t_max; ++s) {
      int keep = std::numeric_limits<int>::max();
      for (const auto& pt : points)
        if (pt.t > s) keep = std::min(keep, pt.n - pt.t + s + 1);
      sys.step(s, keep, p, gen);
      record(s + 1);
    }
  });
  return out;
}

int height_from_particles(const ParticleConfig& config, int first_label, int x) {
  int count = 0;
  for (int pos : config.positions)
    if (pos >= x) ++count;
  const int m = first_label - 1 + count;
  return config.time - x - 2 * m - 1;
}

namespace {

// labels whose positions decide h_t(x) for x in [x_lo, x_hi], t <= t_max
std::pair<int, int> growth_labels(int x_lo, int x_hi, int t_max) {
  return {floor_div(-x_hi, 2), floor_div(t_max - x_lo, 2) + 1};
}

}  // namespace

std::vector<HeightProfile> simulate_growth(const ModelParams& params, int x_lo, int x_hi, int t_max, const RngSpec& rng) {
  if (x_hi < x_lo) throw Error(ErrorKind::WindowTooSmall, "empty site window");
  const auto [lo, hi] = growth_labels(x_lo, x_hi, t_max);
  const auto configs = simulate_tasep(params, InitialCondition{}, LabelWindow{lo, hi}, t_max, rng);
  std::vector<HeightProfile> out;
  for (const auto& c : configs) {
    HeightProfile prof;
    prof.time = c.time;
    for (int x = x_lo; x <= x_hi; ++x) {
      prof.x.push_back(x);
      prof.h.push_back(height_from_particles(c, lo, x));
    }
    out.push_back(std::move(prof));
  }
  return out;
}

std::vector<std::vector<int>> sample_growth_heights(const ModelParams& params, const std::vector<int>& sites, int t,
                                                    std::int64_t samples, const RngSpec& rng, int threads) {
  params.validate();
  if (sites.empty()) throw Error(ErrorKind::WindowTooSmall, "no sites");
  if (t < 0) throw Error(ErrorKind::DomainError, "time must be nonnegative");
  const auto [x_lo, x_hi] = std::minmax_element(sites.begin(), sites.end());
  const auto [lo, hi] = growth_labels(*x_lo, *x_hi, t);
  std::vector<std::vector<int>> out(sites.size(), std::vector<int>(static_cast<std::size_t>(samples)));
  const double p = params.p();
  for_each_batch(samples, threads, [&](std::size_t b, int lanes) {
    auto gen = make_engine(rng, b);
    WordSystem sys(lo - t, hi, t);
    for (int s = 0; s < t; ++s) sys.step(s, lo - t + s + 1, p, gen);
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const auto count = sys.count_right_of(sites[k]);
      for (int l = 0; l < lanes; ++l) {
        const int m = lo - t - 1 + count[l];
        out[k][b * kLanes + l] = t - sites[k] - 2 * m - 1;
      }
    }
  });
  return out;
}

std::vector<Nucleation> sample_nucleations(double t_max, double x_lo, double x_hi, std::mt19937_64& gen) {
  // backward light cone of the segment: |x - [x_lo, x_hi]| < t_max - t
  const double left = x_lo - t_max, right = x_hi + t_max;
  std::poisson_distribution<long> count(2.0 * (right - left) * t_max);
  std::uniform_real_distribution<double> ux(left, right), ut(0.0, t_max);
  std::vector<Nucleation> pts;
  const long n = count(gen);
  for (long i = 0; i < n; ++i) {
    const double x = ux(gen), t = ut(gen);
    const double reach = t_max - t;
    if (x > x_lo - reach && x < x_hi + reach) pts.push_back({x, t});
  }
  return pts;
}

namespace {

int longest_chain(std::vector<std::pair<double, double>>& uv) {
  std::sort(uv.begin(), uv.end());
  std::vector<double> tails;
  for (const auto& [u, v] : uv) {
    // branchless lower_bound
    std::size_t pos = 0;
    if (!tails.empty()) {
      const double* base = tails.data();
      for (std::size_t n = tails.size(); n > 1; n -= n / 2) base = base[n / 2] < v ? base + n / 2 : base;
      pos = static_cast<std::size_t>(base - tails.data()) + (*base < v);
    }
    if (pos == tails.size())
      tails.push_back(v);
    else
      tails[pos] = v;
  }
  return static_cast<int>(tails.size());
}

// nucleations inside the cone of (0, t) in light-cone coordinates, generated in increasing u
int sample_cone_height(double t, std::mt19937_64& gen) {
  std::exponential_distribution<double> gap(1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // unit density in (u, v); cumulative mass up to u is (t + u)^2 / 2, total 2t^2
  const double total = 2.0 * t * t;
  std::vector<double> tails;
  for (double mass = gap(gen); mass < total; mass += gap(gen)) {
    const double u = std::sqrt(2.0 * mass) - t;
    const double v = -u + (t + u) * unit(gen);
    // branchless lower_bound
    std::size_t pos = 0;
    if (!tails.empty()) {
      const double* base = tails.data();
      for (std::size_t n = tails.size(); n > 1; n -= n / 2) base = base[n / 2] < v ? base + n / 2 : base;
      pos = static_cast<std::size_t>(base - tails.data()) + (*base < v);
    }
    if (pos == tails.size())
      tails.push_back(v);
    else
      tails[pos] = v;
  }
  return static_cast<int>(tails.size());
}

}  // namespace

int png_height(const std::vector<Nucleation>& points, double x, double t) {
  std::vector<std::pair<double, double>> uv;
  for (const auto& pt : points) {
    if (pt.t <= 0.0 || pt.t >= t || std::abs(pt.x - x) >= t - pt.t) continue;
    uv.emplace_back(pt.t - (pt.x - x), pt.t + (pt.x - x));
  }
  return longest_chain(uv);
}

HeightProfile simulate_png(double t_max, double x_lo, double x_hi, const RngSpec& rng, int sites) {
  if (!(t_max > 0.0)) throw Error(ErrorKind::DomainError, "PNG time must be positive");
  if (x_hi < x_lo || sites < 1) throw Error(ErrorKind::DomainError, "empty PNG window");
  auto gen = make_engine(rng);
  const auto pts = sample_nucleations(t_max, x_lo, x_hi, gen);
  HeightProfile prof;
  prof.time = t_max;
  for (int i = 0; i < sites; ++i) {
    const double x = sites == 1 ? x_lo : x_lo + (x_hi - x_lo) * i / (sites - 1);
    prof.x.push_back(x);
    prof.h.push_back(png_height(pts, x, t_max));
  }
  return prof;
}

std::vector<int> sample_png_heights(double x, double t, std::int64_t samples, const RngSpec& rng, int threads) {
  (void)x;  // translation invariant
  if (!(t > 0.0)) throw Error(ErrorKind::DomainError, "PNG time must be positive");
  std::vector<int> out(static_cast<std::size_t>(samples));
  for_each_batch(samples, threads, [&](std::size_t b, int lanes) {
    auto gen = make_engine(rng, b);
    for (int l = 0; l < lanes; ++l) out[b * kLanes + l] = sample_cone_height(t, gen);
  });
  return out;
}

double step_weight(const std::vector<int>& z, const std::vector<int>& x, const ModelParams& params) {
  if (z.size() != x.size()) throw Error(ErrorKind::DomainError, "configurations differ in size");
  double w = 1.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const bool blocked = i > 0 && z[i] == z[i - 1] - 1;
    if (blocked)
      w *= x[i] == z[i] ? 1.0 : 0.0;
    else
      w *= x[i] == z[i] ? params.q : (x[i] == z[i] + 1 ? params.p() : 0.0);
  }
  return w;
}

double step_weight_tilde(const std::vector<int>& z, const std::vector<int>& x, const ModelParams& params) {
  if (z.size() != x.size()) throw Error(ErrorKind::DomainError, "configurations differ in size");
  double w = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool tight = i + 1 < x.size() && x[i] == x[i + 1] + 1;
    if (tight)
      w *= z[i] == x[i] ? 1.0 : 0.0;
    else
      w *= z[i] == x[i] ? params.q : (z[i] == x[i] - 1 ? params.p() : 0.0);
  }
  return w;
}

int adjacent_pairs(const std::vector<int>& x) {
  int count = 0;
  for (std::size_t j = 0; j + 1 < x.size(); ++j)
    if (x[j] - x[j + 1] == 1) ++count;
  return count;
}

std::map<std::vector<int>, double> brute_force_law(const ParticleConfig& y, int t, const ModelParams& params) {
  y.validate();
  params.validate();
  const auto exact = transition_law<Rational>(y.positions, t, Rational(params.q));
  std::map<std::vector<int>, double> out;
  for (const auto& [x, w] : exact) out[x] = static_cast<double>(w);
  return out;
}

double brute_force_transition(const ParticleConfig& y, const ParticleConfig& x, int t, const ModelParams& params) {
  x.validate();
  if (x.positions.size() != y.positions.size()) throw Error(ErrorKind::DomainError, "configurations differ in size");
  const auto law = brute_force_law(y, t, params);
  const auto it = law.find(x.positions);
  return it == law.end() ? 0.0 : it->second;
}

double G_det(const ParticleConfig& y, const ParticleConfig& x, int t, const ModelParams& params) {
  y.validate();
  x.validate();
  params.validate();
  const int n = static_cast<int>(x.positions.size());
  if (static_cast<int>(y.positions.size()) != n) throw Error(ErrorKind::DomainError, "configurations differ in size");
  Eigen::MatrixXd m(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j)
      m(i - 1, j - 1) = F(j - i, x.positions[n - j] - y.positions[n - i], t + j - i, params);
  return std::pow(params.q, adjacent_pairs(x.positions)) * small_det(m);
}

double D_block(int n, const ModelParams& params) {
  if (n < 1) throw Error(ErrorKind::DomainError, "block size must be positive");
  Eigen::MatrixXd m(n, n);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) m(i - 1, j - 1) = F(j - i, j - i, j - i, params);
  return small_det(m);
}

double W_marginal(const ParticleConfig& y, const ParticleConfig& x, int t, const ModelParams& params) {
  y.validate();
  x.validate();
  params.validate();
  const int n = static_cast<int>(x.positions.size());
  if (static_cast<int>(y.positions.size()) != n) throw Error(ErrorKind::DomainError, "configurations differ in size");
  if (n > 4 || t > 4) throw Error(ErrorKind::TooLarge, "signed-measure sum limited to N <= 4 and t <= 4");
  if (t < 0) throw Error(ErrorKind::DomainError, "time must be nonnegative");

  // row i (1-based): f_i(z) = F_{1-i}(z - y_{N+1-i}, t+1-i); vanishes for z - y > t+1-i when that time is >= 0
  auto f = [&](int i, int z) { return F(1 - i, z - y.positions[n - i], t + 1 - i, params); };
  const int x_min = x.positions[n - 1];
  int top = x_min;
  bool negative_rows = false;
  for (int i = 1; i <= n; ++i) {
    const int s = t + 1 - i;
    if (s >= 0)
      top = std::max(top, y.positions[n - i] + s);
    else
      negative_rows = true;
  }
  if (negative_rows) {
    // rows with negative time decay like (p/q)^z only for q > 1/2
    if (params.q <= 0.5)
      throw Error(ErrorKind::NonConvergent, "negative-time rows diverge for q <= 1/2 (t < N - 1)");
    const int start = top;
    for (int z = start + 1;; ++z) {
      double biggest = 0.0;
      for (int i = t + 2; i <= n; ++i) biggest = std::max(biggest, std::abs(f(i, z)));
      if (biggest < 1e-14) break;
      top = z;
      if (z > start + 2000) throw Error(ErrorKind::NonConvergent, "signed-measure tail does not decay");
    }
  }
  std::vector<std::vector<double>> table(n + 1, std::vector<double>(top - x_min + 1));
  for (int i = 1; i <= n; ++i)
    for (int z = x_min; z <= top; ++z) table[i][z - x_min] = f(i, z);

  const double p = params.p();
  auto phi = [p](int a, int b) { return b >= a ? 1.0 : (b == a - 1 ? p : 0.0); };

  // level k (1-based, k < N) summed against the given level k+1
  std::function<double(int, const std::vector<int>&)> level_sum = [&](int k, const std::vector<int>& upper) -> double {
    if (k == 0) return 1.0;
    std::vector<int> cur(k);
    cur[0] = x.positions[k - 1];
    const int high = *std::max_element(upper.begin(), upper.end()) + 1;
    double total = 0.0;
    Eigen::MatrixXd m(k + 1, k + 1);
    for_each_increasing(cur, 1, high, [&] {
      for (int j = 0; j <= k; ++j) {
        m(0, j) = 1.0;
        for (int i = 1; i <= k; ++i) m(i, j) = phi(cur[i - 1], upper[j]);
      }
      const double d = small_det(m);
      if (d != 0.0) total += d * level_sum(k - 1, cur);
    });
    return total;
  };

  std::vector<int> level(n);
  level[0] = x_min;
  double total = 0.0;
  Eigen::MatrixXd m(n, n);
  for_each_increasing(level, 1, top, [&] {
    for (int i = 1; i <= n; ++i)
      for (int j = 1; j <= n; ++j) m(i - 1, j - 1) = table[i][level[j - 1] - x_min];
    const double d = small_det(m);
    if (d != 0.0) total += d * level_sum(n - 1, level);
  });
  return total;
}

std::vector<LemmaCheck> lemma_suite(std::uint64_t seed) {
  std::vector<LemmaCheck> report;
  std::mt19937_64 gen(seed);
  const Rational q(1, 2);

  auto phi_nu = [&](const Rational& nu, int a, int b) -> Rational {
    if (b >= a) return rational_pow(nu, b - a);
    if (b == a - 1) return 1 - q;
    return 0;
  };
  auto g_nu = [&](const Rational& nu, int a, int b) -> Rational {
    if (b >= a) return 0;
    if (b == a - 1) return rational_pow(nu, b) * (1 - (1 - q) * nu);
    return rational_pow(nu, b);
  };

  // g_ν branch at a = b + 1
  {
    const Rational nu(7, 10);
    const Rational expect = rational_pow(nu, 3) * (1 - (1 - q) * nu);
    report.push_back({"g_nu(b+1, b) = nu^b (1 - (1-q) nu)", g_nu(nu, 4, 3) == expect, 0.0});
  }

  // antisymmetric f on (b0, b0 + support]: both sides summed over increasing tuples
  for (int n : {2, 3})
    for (const Rational& nu : {Rational(1), Rational(7, 10)}) {
      const int b0 = 0, support = 5;
      std::uniform_int_distribution<int> val(-9, 9);
      std::map<std::vector<int>, Rational> f;
      std::vector<int> b(n + 1);
      b[0] = b0;
      for_each_increasing(b, 1, b0 + support, [&] { f[std::vector<int>(b.begin() + 1, b.end())] = val(gen); });
      bool ok = true;
      double worst = 0.0;
      for (int a1 : {b0 - 1, b0, b0 + 1, b0 + 2, b0 + 3}) {
        std::vector<int> a(n + 1);
        a[1] = a1;
        std::uniform_int_distribution<int> step(1, 3);
        for (int i = 2; i <= n; ++i) a[i] = a[i - 1] + step(gen);
        Rational lhs = 0, rhs = 0;
        for (const auto& [tuple, fv] : f) {
          std::vector<int> cols{b0};
          cols.insert(cols.end(), tuple.begin(), tuple.end());
          std::vector<std::vector<Rational>> full(n + 1, std::vector<Rational>(n + 1));
          for (int j = 0; j <= n; ++j) {
            full[0][j] = rational_pow(nu, cols[j]);
            for (int i = 1; i <= n; ++i) full[i][j] = phi_nu(nu, a[i], cols[j]);
          }
          std::vector<std::vector<Rational>> minor(n, std::vector<Rational>(n));
          for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) minor[i - 1][j - 1] = full[i][j];
          lhs += rational_det(full) * fv;
          rhs += rational_det(minor) * fv;
        }
        rhs *= g_nu(nu, a1, b0);
        ok = ok && lhs == rhs;
        worst = std::max(worst, std::abs(static_cast<double>(lhs - rhs)));
      }
      report.push_back({"det_f n=" + std::to_string(n) + " nu=" + (nu == 1 ? std::string("1") : std::string("7/10")), ok,
                        worst});
    }

  // summed product of interlacing determinants over Vandermonde
  for (int n : {2, 3}) {
    const Rational p = 1 - q;
    auto phi = [&](int a, int b) -> Rational { return b >= a ? Rational(1) : (b == a - 1 ? p : Rational(0)); };
    std::function<Rational(int, const std::vector<int>&)> below = [&](int k, const std::vector<int>& upper) -> Rational {
      if (k == 0) return 1;
      const int low = *std::min_element(upper.begin(), upper.end()) + 1;
      const int high = *std::max_element(upper.begin(), upper.end()) + 1;
      Rational total = 0;
      std::vector<int> cur(k + 1);
      cur[0] = low - 1;
      for_each_increasing(cur, 1, high, [&] {
        std::vector<int> level(cur.begin() + 1, cur.end());
        std::vector<std::vector<Rational>> m(k + 1, std::vector<Rational>(k + 1));
        for (int j = 0; j <= k; ++j) {
          m[0][j] = 1;
          for (int i = 1; i <= k; ++i) m[i][j] = phi(level[i - 1], upper[j]);
        }
        const Rational d = rational_det(m);
        if (d != 0) total += d * below(k - 1, level);
      });
      return total;
    };
    std::vector<Rational> ratios;
    std::uniform_int_distribution<int> site(-6, 6);
    while (ratios.size() < 10) {
      std::vector<int> top(n);
      for (int& v : top) v = site(gen);
      std::sort(top.begin(), top.end());
      if (std::adjacent_find(top.begin(), top.end()) != top.end()) continue;
      Rational vandermonde = 1;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) vandermonde *= top[j] - top[i];
      ratios.push_back(below(n - 1, top) / vandermonde);
    }
    Rational mean = 0, var = 0;
    for (const auto& r : ratios) mean += r;
    mean /= ratios.size();
    for (const auto& r : ratios) var += (r - mean) * (r - mean);
    var /= ratios.size();
    const double variance = static_cast<double>(var);
    report.push_back({"Vandermonde ratio n=" + std::to_string(n), variance < 1e-18 && mean != 0, variance});
  }
  return report;
}

}  // namespace kpz
