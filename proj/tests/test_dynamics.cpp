#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <vector>

#include "kpz/dynamics.hpp"
#include "kpz/error.hpp"
#include "kpz/fredholm.hpp"
#include "oracles/enumerate.hpp"

using namespace kpz;

namespace {

// |empirical - exact| in binomial standard deviations
double z_score(double hits, double samples, double exact) {
  const double sigma = std::sqrt(std::max(exact * (1.0 - exact), 1e-12) / samples);
  return std::abs(hits / samples - exact) / sigma;
}

// all strictly decreasing N-tuples with entries in [lo, hi]
std::vector<std::vector<int>> decreasing_tuples(int n, int lo, int hi) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int below) -> void {
    if (static_cast<int>(cur.size()) == n) {
      out.push_back(cur);
      return;
    }
    for (int v = lo; v < below; ++v) {
      cur.push_back(v);
      self(self, v);
      cur.pop_back();
    }
  };
  rec(rec, hi + 1);
  return out;
}

ParticleConfig config(std::vector<int> x, int t = 0) { return {std::move(x), t}; }

}  // namespace

TEST_CASE("brute-force transition examples") {
  const ModelParams half{0.5};
  CHECK(brute_force_transition(config({-2}), config({-2}), 0, half) == 1.0);
  CHECK(brute_force_transition(config({-2}), config({-1}), 0, half) == 0.0);
  CHECK(brute_force_transition(config({-2}), config({-1}), 2, half) == 0.5);
  const ModelParams mp{0.3};
  CHECK(std::abs(brute_force_transition(config({-2, -4}), config({-1, -3}), 1, mp) - 0.49) < 1e-15);
  double total = 0.0;
  for (const auto& [x, w] : brute_force_law(config({0, -1, -3}), 4, mp)) total += w;
  CHECK(std::abs(total - 1.0) < 1e-15);
  CHECK_THROWS_AS(brute_force_law(config({0, -1, -2, -3, -4, -5, -6}), 1, mp), Error);
  CHECK_THROWS_AS(brute_force_law(config({0}), 7, mp), Error);
}

TEST_CASE("blocking is judged on the previous configuration") {
  const ModelParams mp{0.4};
  const auto law = brute_force_law(config({0, -1}), 1, mp);
  CHECK(law.count({1, 0}) == 0);
  CHECK(std::abs(law.at({1, -1}) - mp.p()) < 1e-15);
  CHECK(std::abs(law.at({0, -1}) - mp.q) < 1e-15);
}

TEST_CASE("exact rational enumeration") {
  using R = boost::multiprecision::cpp_rational;
  const auto law = transition_law<R>({0, -2}, 2, R(1, 3));
  R total = 0;
  for (const auto& [x, w] : law) total += w;
  CHECK(total == 1);
  // both particles hop twice: (2/3)^4
  CHECK(law.at({2, 0}) == R(16, 81));
}

TEST_CASE("initial-condition determinant") {
  const ModelParams mp{0.5};
  CHECK(std::abs(D_block(1, mp) - 1.0) < 1e-12);
  CHECK(std::abs(D_block(3, mp) - 4.0) < 1e-10);
  CHECK(std::abs(D_block(4, ModelParams{0.3}) - 1.0 / (0.3 * 0.3 * 0.3)) < 1e-9);
  for (const auto& y : {std::vector<int>{0, -1, -2}, std::vector<int>{3, 0, -1, -5}, std::vector<int>{-2, -4}}) {
    CHECK(std::abs(G_det(config(y), config(y), 0, mp) - 1.0) < 1e-12);
    auto x = y;
    x.front() += 1;
    CHECK(std::abs(G_det(config(y), config(x), 0, mp)) < 1e-12);
  }
}

TEST_CASE("determinantal transition matches enumeration") {
  double worst = 0.0;
  for (double q : {0.3, 0.5}) {
    const ModelParams mp{q};
    for (const auto& y : {std::vector<int>{-2}, std::vector<int>{0, -1}, std::vector<int>{-2, -4}, std::vector<int>{1, 0, -3}})
      for (int t = 0; t <= 3; ++t)
        for (const auto& [x, w] : brute_force_law(config(y), t, mp))
          worst = std::max(worst, std::abs(G_det(config(y), config(x), t, mp) - w));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("signed-measure marginal") {
  const ModelParams mp{0.5};
  // one particle: the 1x1 determinant F_0(x - y, t) is the binomial law
  for (int x = -2; x <= 1; ++x)
    CHECK(std::abs(W_marginal(config({-2}), config({x}), 3, mp) - brute_force_transition(config({-2}), config({x}), 3, mp)) <
          1e-12);
  for (const auto& x : {std::vector<int>{-1, -3}, std::vector<int>{-2, -3}, std::vector<int>{-1, -4}})
    CHECK(std::abs(W_marginal(config({-2, -4}), config(x), 1, mp) - G_det(config({-2, -4}), config(x), 1, mp)) < 1e-9);
  for (const auto& [x, w] : brute_force_law(config({0, -1, -3}), 2, mp))
    CHECK(std::abs(W_marginal(config({0, -1, -3}), config(x), 2, mp) - w) < 1e-8);
  // time below N - 1: rows with negative time, summable only for q > 1/2
  const ModelParams heavy{0.7};
  for (const auto& [x, w] : brute_force_law(config({0, -2, -3}), 1, heavy))
    CHECK(std::abs(W_marginal(config({0, -2, -3}), config(x), 1, heavy) - w) < 1e-8);
  CHECK_THROWS_AS(W_marginal(config({0, -2, -3}), config({0, -2, -3}), 1, mp), Error);
  CHECK_THROWS_AS(W_marginal(config({0, -2, -3, -5, -7}), config({0, -2, -3, -5, -7}), 1, heavy), Error);
}

TEST_CASE("weight identity between departure and arrival weights") {
  for (double q : {0.3, 0.5}) {
    const ModelParams mp{q};
    double worst = 0.0;
    int checked = 0;
    for (int n = 1; n <= 4; ++n)
      for (const auto& z : decreasing_tuples(n, 0, 2 * n + 1))
        for (unsigned m = 0; m < (1u << n); ++m) {
          std::vector<int> x = z;
          for (int i = 0; i < n; ++i) x[i] += (m >> i) & 1u;
          bool valid = true;
          for (int i = 1; i < n; ++i) valid = valid && x[i] < x[i - 1];
          if (!valid) continue;
          const double lhs = std::pow(q, adjacent_pairs(z)) * step_weight(z, x, mp);
          const double rhs = std::pow(q, adjacent_pairs(x)) * step_weight_tilde(z, x, mp);
          worst = std::max(worst, std::abs(lhs - rhs));
          ++checked;
        }
    CHECK(worst < 1e-15);
    CHECK(checked > 500);
  }
}

TEST_CASE("lemma suite") {
  const auto report = lemma_suite(3);
  CHECK(report.size() == 7);
  for (const auto& c : report) {
    INFO(c.name);
    CHECK(c.passed);
  }
}

TEST_CASE("simulated TASEP") {
  // near-deterministic limit
  const auto traj = simulate_tasep(ModelParams{1e-12}, InitialCondition{}, LabelWindow{1, 5}, 6, RngSpec{1, 0});
  CHECK(traj.size() == 7);
  for (const auto& c : traj)
    for (int i = 0; i < 5; ++i) CHECK(c.positions[i] == -2 * (i + 1) + c.time);

  // same spec, same trajectory
  const ModelParams mp{0.5};
  const auto a = simulate_tasep(mp, InitialCondition{}, LabelWindow{-3, 3}, 20, RngSpec{42, 7});
  const auto b = simulate_tasep(mp, InitialCondition{}, LabelWindow{-3, 3}, 20, RngSpec{42, 7});
  const auto c = simulate_tasep(mp, InitialCondition{}, LabelWindow{-3, 3}, 20, RngSpec{42, 8});
  CHECK(a == b);
  CHECK_FALSE(a == c);
  for (const auto& cfg : a) CHECK_NOTHROW(cfg.validate());

  LabelWindow tight{1, 3, 2};
  CHECK_THROWS_AS(simulate_tasep(mp, InitialCondition{}, tight, 5, RngSpec{}), Error);
  // a finite system's first particle needs no shield
  const InitialCondition two{InitialCondition::Kind::FiniteList, {-2, -4}};
  CHECK_NOTHROW(simulate_tasep(mp, two, LabelWindow{1, 2, 0}, 5, RngSpec{}));
}

TEST_CASE("simulated laws") {
  const ModelParams mp{0.5};
  const InitialCondition one{InitialCondition::Kind::FiniteList, {0}};
  const int samples = 200000;
  int moved_once = 0;
  for (int s = 0; s < samples; ++s) {
    const auto traj = simulate_tasep(mp, one, LabelWindow{1, 1}, 2, RngSpec{5, static_cast<std::uint64_t>(s)});
    moved_once += traj[2].positions[0] == 1;
  }
  CHECK(z_score(moved_once, samples, 0.5) < 3.0);

  const InitialCondition two{InitialCondition::Kind::FiniteList, {-2, -4}};
  std::map<std::vector<int>, int> counts;
  for (int s = 0; s < samples; ++s)
    counts[simulate_tasep(mp, two, LabelWindow{1, 2}, 1, RngSpec{6, static_cast<std::uint64_t>(s)})[1].positions]++;
  for (const auto& [x, w] : brute_force_law(config({-2, -4}), 1, mp)) CHECK(z_score(counts[x], samples, w) < 4.0);
}

TEST_CASE("word-parallel sampler") {
  std::mt19937_64 gen(11);
  double ones = 0;
  for (int i = 0; i < 20000; ++i) ones += std::popcount(bernoulli_mask(gen, 0.3));
  CHECK(z_score(ones, 20000.0 * 64, 0.3) < 4.0);
  CHECK(bernoulli_mask(gen, 0.0) == 0);

  for (double q : {0.5, 0.7}) {
    const ModelParams mp{q};
    const std::vector<SpaceTimePoint> pts = {{2, 3}, {3, 3}, {5, 1}};
    const std::int64_t samples = 100000;
    const auto draws = sample_tasep_points(mp, pts, samples, RngSpec{9, 1});
    for (int base : {-4, -2}) {
      const std::vector<int> cuts = {base, base - 2, base - 7};
      int hits = 0;
      for (std::int64_t s = 0; s < samples; ++s) {
        bool all = true;
        for (std::size_t k = 0; k < pts.size(); ++k) all = all && draws[k][s] >= cuts[k];
        hits += all;
      }
      CHECK(z_score(hits, samples, oracle::joint_probability(pts, cuts, q, false)) < 4.0);
    }
  }
  const auto a = sample_tasep_points(ModelParams{0.5}, {{4, 6}}, 130, RngSpec{3, 3});
  const auto b = sample_tasep_points(ModelParams{0.5}, {{4, 6}}, 130, RngSpec{3, 3}, 2);
  CHECK(a == b);
}

TEST_CASE("growth heights") {
  const ModelParams mp{0.5};
  const RngSpec rng{21, 0};
  const auto profiles = simulate_growth(mp, -6, 6, 8, rng);
  CHECK(profiles.size() == 9);
  for (std::size_t i = 0; i < profiles[0].x.size(); ++i) {
    const int x = static_cast<int>(profiles[0].x[i]);
    CHECK(profiles[0].h[i] == (x % 2 == 0 ? -1 : 0));
  }
  for (const auto& prof : profiles)
    for (std::size_t i = 1; i < prof.h.size(); ++i) CHECK(std::abs(prof.h[i] - prof.h[i - 1]) == 1);

  // h_t(x) <= H iff x_{⌊(t-x-H)/2⌋}(t) >= x on the same trajectory
  const auto traj = simulate_tasep(mp, InitialCondition{}, LabelWindow{-3, 8}, 8, rng);  // the labels simulate_growth uses
  for (const auto& prof : profiles) {
    const auto& cfg = traj[static_cast<std::size_t>(prof.time)];
    for (std::size_t i = 0; i < prof.x.size(); ++i) {
      const int x = static_cast<int>(prof.x[i]);
      for (int H = prof.h[i] - 3; H <= prof.h[i] + 3; ++H) {
        const int n = static_cast<int>(std::floor((cfg.time - x - H) / 2.0));
        if (n < -3 || n > 8) continue;
        CHECK((prof.h[i] <= H) == (cfg.positions[n + 3] >= x));
      }
    }
  }
  CHECK_THROWS_AS(simulate_growth(mp, 3, 2, 4, rng), Error);

  const std::int64_t samples = 100000;
  const auto heights = sample_growth_heights(mp, {0, 1}, 4, samples, RngSpec{4, 4});
  for (int H : {-1, 0, 1}) {
    int below0 = 0, both = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
      below0 += heights[0][s] <= H;
      both += heights[0][s] <= H && heights[1][s] <= H;
    }
    CHECK(z_score(below0, samples, joint_prob_growth({{0, 4, H}}, mp)) < 4.0);
    CHECK(z_score(both, samples, joint_prob_growth({{0, 4, H}, {1, 4, H}}, mp)) < 4.0);
  }
}

TEST_CASE("PNG simulation") {
  const std::int64_t samples = 40000;
  const auto h = sample_png_heights(0.0, 0.5, samples, RngSpec{8, 0});
  int zero = 0;
  for (int v : h) zero += v == 0;
  CHECK(z_score(zero, samples, std::exp(-0.5)) < 4.0);

  const auto g = sample_png_heights(0.0, 1.0, samples, RngSpec{8, 1});
  for (int H : {0, 1, 2}) {
    int below = 0;
    for (int v : g) below += v <= H;
    CHECK(z_score(below, samples, joint_prob_png(PNGObservation{{{0.0, 1.0}}, {H}})) < 4.0);
  }

  // the point-set construction agrees with the cone sampler
  int below = 0;
  const int runs = 20000;
  for (int s = 0; s < runs; ++s) {
    const auto prof = simulate_png(1.0, 0.0, 0.0, RngSpec{10, static_cast<std::uint64_t>(s)}, 1);
    below += prof.h[0] <= 1;
  }
  CHECK(z_score(below, runs, joint_prob_png(PNGObservation{{{0.0, 1.0}}, {1}})) < 4.0);

  // adding a nucleation never lowers the height
  auto gen = make_engine(RngSpec{12, 0});
  auto pts = sample_nucleations(2.0, -1.0, 1.0, gen);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), ut(0.0, 2.0);
  for (int k = 0; k < 50; ++k) {
    const int before = png_height(pts, 0.3, 2.0);
    pts.push_back({ux(gen), ut(gen)});
    CHECK(png_height(pts, 0.3, 2.0) >= before);
  }
  CHECK(png_height({}, 0.0, 1.0) == 0);
  CHECK(simulate_png(2.0, -1.0, 1.0, RngSpec{1, 1}).h == simulate_png(2.0, -1.0, 1.0, RngSpec{1, 1}).h);
}
