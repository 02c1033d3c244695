#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "kpz/error.hpp"
#include "kpz/fredholm.hpp"
#include "oracles/enumerate.hpp"

using namespace kpz;

namespace {

// det(1 - M) by cofactor expansion along the first row
double cofactor_det(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 1) return a(0, 0);
  double total = 0.0;
  for (int c = 0; c < n; ++c) {
    Eigen::MatrixXd minor(n - 1, n - 1);
    for (int i = 1; i < n; ++i)
      for (int j = 0, jj = 0; j < n; ++j)
        if (j != c) minor(i - 1, jj++) = a(i, j);
    total += (c % 2 ? -1.0 : 1.0) * a(0, c) * cofactor_det(minor);
  }
  return total;
}

ObservationPath path_of(std::vector<SpaceTimePoint> pts, std::vector<int> cuts) { return {std::move(pts), std::move(cuts)}; }

}  // namespace

TEST_CASE("det(1 - M) of small matrices") {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.25, 0.1, 0.2;
  CHECK(std::abs(determinant(m) - (0.5 * 0.8 - 0.025)) < 1e-15);
  CHECK(determinant(Eigen::MatrixXd::Zero(3, 3)) == 1.0);

  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::MatrixXd r(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r(i, j) = u(gen);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(6, 6);
  CHECK(std::abs(determinant(r) - cofactor_det(id - r)) < 1e-13);

  BlockMatrix block{{2, 1}, {{0, 0}, {0, 1}, {1, 0}}, r.topLeftCorner(3, 3)};
  CHECK(std::abs(determinant(block) - cofactor_det(id.topLeftCorner(3, 3) - r.topLeftCorner(3, 3))) < 1e-14);
  BlockMatrix bad{{2, 2}, {{0, 0}, {0, 1}, {1, 0}}, r.topLeftCorner(3, 3)};
  CHECK_THROWS_AS(bad.check(), Error);
}

TEST_CASE("TASEP joint distribution matches exhaustive enumeration") {
  const std::vector<std::vector<SpaceTimePoint>> paths = {
      {{1, 2}}, {{1, 2}, {2, 1}}, {{2, 3}, {3, 3}}, {{1, 3}, {3, 2}}, {{2, 4}, {2, 2}}};
  double worst_flat = 0.0, worst_finite = 0.0;
  for (double q : {0.5, 0.3}) {
    const ModelParams mp{q};
    for (const auto& pts : paths)
      for (int base = -4; base <= 1; base += 2) {
        std::vector<int> cuts;
        for (const auto& p : pts) cuts.push_back(base - 2 * (p.n - 1) + p.t / 2);
        const ObservationPath path{pts, cuts};
        worst_flat = std::max(worst_flat, std::abs(joint_prob_tasep(path, mp) - oracle::joint_probability(pts, cuts, q, false)));
        worst_finite = std::max(worst_finite, std::abs(joint_prob_tasep(path, mp, TasepKernel::finite(6)) -
                                                       oracle::joint_probability(pts, cuts, q, true)));
      }
  }
  CHECK(worst_flat < 1e-8);
  CHECK(worst_finite < 1e-8);
}

TEST_CASE("finite-N kernel rows vanish left of the starting site") {
  const ModelParams mp{0.5};
  for (const SpaceTimePoint p : {SpaceTimePoint{1, 2}, SpaceTimePoint{2, 3}, SpaceTimePoint{3, 3}})
    for (int x = -2 * p.n - 6; x < -2 * p.n; ++x)
      for (int y = -12; y <= 2; ++y) CHECK(std::abs(K_finiteN(p, p, x, y, mp, 6)) < 1e-15);
}

TEST_CASE("TASEP one-point example") {
  const auto path = path_of({{1, 2}}, {-1});
  CHECK(std::abs(joint_prob_tasep(path, ModelParams{0.5}) - 0.75) < 1e-10);
  // cuts at or below the starting positions are certain
  CHECK(joint_prob_tasep(path_of({{1, 3}, {2, 1}}, {-2, -4}), ModelParams{0.4}) == 1.0);
}

TEST_CASE("joint probability is monotone in each cut") {
  const ModelParams mp{0.4};
  double prev = 1.0;
  for (int a = -6; a <= 4; ++a) {
    const double v = joint_prob_tasep(path_of({{2, 4}, {3, 3}}, {a, -2}), mp);
    CHECK(v <= prev + 1e-10);
    prev = v;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("kernel conjugation leaves the determinant unchanged") {
  const ModelParams mp{0.6};
  const auto path = path_of({{3, 5}, {4, 4}, {6, 2}}, {-3, -5, -9});
  FredholmOptions none, png;
  none.conjugation = Conjugation::None;
  png.conjugation = Conjugation::PNG;
  const double standard = joint_prob_tasep(path, mp);
  CHECK(std::abs(joint_prob_tasep(path, mp, TasepKernel::flat(), none) - standard) < 1e-9);
  CHECK(std::abs(joint_prob_tasep(path, mp, TasepKernel::flat(), png) - standard) < 1e-9);
}

TEST_CASE("flat and finite-N systems agree once particles are shielded by the light cone") {
  // x_n(t) only depends on labels n - t .. n, so N >= n and n > t make the systems identical
  const ModelParams mp{0.5};
  for (const auto& path : {path_of({{4, 3}}, {-6}), path_of({{5, 3}, {6, 2}}, {-8, -11})}) {
    const auto flat = joint_prob_tasep_detailed(path, mp);
    const auto finite = joint_prob_tasep_detailed(path, mp, TasepKernel::finite(8));
    CHECK(std::abs(flat.probability - finite.probability) < 1e-9);
    CHECK(flat.window.converged);
    CHECK(flat.window.lo.size() == path.points.size());
  }
}

TEST_CASE("growth heights through the TASEP correspondence") {
  const ModelParams mp{0.5};
  // h_t(x) <= H iff x_{floor((t-x-H)/2)}(t) >= x
  for (int x : {-1, 0, 1, 2})
    for (int H : {-1, 0, 1, 2}) {
      const int t = 3;
      const int n = static_cast<int>(std::floor((t - x - H) / 2.0));
      const double expected = oracle::joint_probability({{n, t}}, {x}, mp.q, false);
      CHECK(std::abs(joint_prob_growth({{x, t, H}}, mp) - expected) < 1e-9);
    }
  // two points at the same time
  const std::vector<GrowthPoint> pts = {{0, 3, 1}, {2, 3, 0}};
  const ObservationPath path = growth_to_tasep_path(pts);
  CHECK_NOTHROW(path.validate());
  const double two = joint_prob_growth(pts, mp);
  CHECK(two <= joint_prob_growth({pts[0]}, mp) + 1e-12);
  CHECK(two <= joint_prob_growth({pts[1]}, mp) + 1e-12);
  const double shifted = joint_prob_growth({{2, 3, 1}, {4, 3, 0}}, mp);
  CHECK(std::abs(shifted - two) < 1e-9);  // translation by two sites
}

TEST_CASE("PNG single point and splitting") {
  const PNGObservation one{{{0.0, 1.0}}, {0}};
  CHECK(std::abs(joint_prob_png(one) - std::exp(-2.0)) < 1e-9);
  CHECK(std::abs(joint_prob_png(one, PNGKernel::fixed_time(1.0)) - std::exp(-2.0)) < 1e-9);
  CHECK(joint_prob_png(PNGObservation{{{0.0, 0.5}}, {12}}) > 1.0 - 1e-10);

  const PNGObservation far{{{0.0, 0.5}, {1.5, 0.5}}, {1, 2}};
  const double prod = joint_prob_png(PNGObservation{{{0.0, 0.5}}, {1}}) * joint_prob_png(PNGObservation{{{1.5, 0.5}}, {2}});
  CHECK(std::abs(joint_prob_png(far) - prod) < 1e-10);
  CHECK(std::abs(joint_prob_png(far, PNGKernel::fixed_time(0.5)) - prod) < 1e-10);

  const PNGObservation near{{{0.0, 0.6}, {0.5, 0.6}}, {1, 1}};
  const double joint = joint_prob_png(near);
  CHECK(std::abs(joint - joint_prob_png(near, PNGKernel::fixed_time(0.6))) < 1e-10);
  CHECK(joint < joint_prob_png(PNGObservation{{{0.0, 0.6}}, {1}}));
}

TEST_CASE("Airy1 one-point distribution") {
  const AiryObservation far_right{{0.0}, {8.0}};
  CHECK(joint_prob_airy1(far_right) > 1.0 - 1e-10);
  AiryOptions coarse;
  coarse.panel_order = 10;
  double prev = 0.0;
  for (double s : {-2.0, -1.0, 0.0, 1.0}) {
    const AiryObservation obs{{0.0}, {s}};
    const double fine = joint_prob_airy1(obs);
    CHECK(std::abs(fine - joint_prob_airy1(obs, coarse)) < 1e-9);
    CHECK(fine > prev);
    prev = fine;
  }
  // GOE Tracy-Widom at 2^{2/3} s: F1(0) for s = 0
  CHECK(std::abs(joint_prob_airy1(AiryObservation{{0.0}, {0.0}}) - 0.8319) < 1e-4);
}
