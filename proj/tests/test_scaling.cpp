#include <cmath>
#include <random>

#include <doctest.h>

#include "kpz/error.hpp"
#include "kpz/scaling.hpp"
#include "kpz/stats.hpp"

using namespace kpz;

TEST_CASE("empirical cdf and ks distance") {
  EmpiricalCDF emp({3.0, 1.0, 2.0, 2.0});
  CHECK(emp(0.5) == 0.0);
  CHECK(emp(1.0) == 0.25);
  CHECK(emp(2.0) == 0.75);
  CHECK(emp.below(2.0) == 0.25);
  CHECK(emp(10.0) == 1.0);
  // against the uniform law on [0,4]: jumps at 1,2,3 give |0.75-0.5| as the worst gap
  CHECK(ks_distance(emp, [](double s) { return std::clamp(s / 4.0, 0.0, 1.0); }) == doctest::Approx(0.25));
  CHECK(dkw_band(100000) == doctest::Approx(std::sqrt(std::log(200.0) / 200000.0)));
  CHECK(binomial_z(0.5, 0.5, 10) == 0.0);
  CHECK(binomial_z(0.6, 0.5, 100) == doctest::Approx(2.0));
}

TEST_CASE("ks distance of uniform samples lies within the dkw band") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> v(20000);
  for (auto& x : v) x = unif(gen);
  const double ks = ks_distance(EmpiricalCDF(v), [](double s) { return std::clamp(s, 0.0, 1.0); });
  CHECK(ks < dkw_band(20000));
}

TEST_CASE("tabulated cdf interpolates and clamps") {
  TabulatedCDF t(0.0, 2.0, {0.0, 0.5, 1.0});
  CHECK(t(-1.0) == 0.0);
  CHECK(t(0.5) == doctest::Approx(0.25));
  CHECK(t(1.5) == doctest::Approx(0.75));
  CHECK(t(3.0) == 1.0);
}

TEST_CASE("path spec derivatives and invariants") {
  SpaceLikePathSpec s;
  s.pi = [](double th) { return 1.0 - th + 0.3 * th * th; };
  s.theta = 0.2;
  CHECK(s.d1() == doctest::Approx(-1.0 + 0.12).epsilon(1e-8));
  CHECK(s.d2() == doctest::Approx(0.6).epsilon(1e-4));
  s.validate();
  SpaceLikePathSpec steep;
  steep.pi = [](double th) { return 2.0 * th + 1.0; };
  CHECK_THROWS_AS(steep.validate(), Error);
  SpaceLikePathSpec negative;
  negative.pi = [](double th) { return -1.0 - th; };
  CHECK_THROWS_AS(negative.validate(), Error);
}

TEST_CASE("tasep observation points") {
  const auto ft = SpaceLikePathSpec::fixed_time();
  const auto o = tasep_observation(ft, 0.5, 100.0, 0.0);
  CHECK(o.point.t == 100);
  CHECK(o.point.n == 100);
  CHECK(o.reference == doctest::Approx(-200.0 + (1 - std::sqrt(0.5)) * 100.0));
  CHECK(o.rescale(-200) == doctest::Approx(-(-200 - o.reference) / std::cbrt(100.0)));

  // fixed time: (π'+1) vanishes so t does not move with u
  for (double u : {-2.0, -0.5, 1.0, 3.0}) CHECK(tasep_observation(ft, 0.5, 1000.0, u).point.t == 1000);

  // tagged particle: 1 - π' vanishes so n does not move with u
  const auto tag = SpaceLikePathSpec::tagged_particle(0.5);
  for (double u : {-2.0, 0.0, 1.5}) CHECK(tasep_observation(tag, 0.5, 400.0, u).point.n == 200);

  // π' = 0: the T^{2/3} corrections of t and n flip sign under u -> -u
  SpaceLikePathSpec flat;
  flat.pi = [](double) { return 1.0; };
  flat.theta = 0.0;
  const double T = 1000.0;
  const auto plus = tasep_observation(flat, 0.5, T, 1.0), minus = tasep_observation(flat, 0.5, T, -1.0);
  CHECK(std::abs((plus.point.t - T) + (minus.point.t - T)) <= 1);
  CHECK(std::abs((plus.point.n - T) + (minus.point.n - T)) <= 1);

  // floors stay within 1 of the unfloored expressions
  SpaceLikePathSpec curved;
  curved.pi = [](double th) { return 1.0 + 0.2 * th * th - 0.5 * th; };
  curved.theta = 0.1;
  for (double u : {-1.3, 0.4, 2.2}) {
    const auto c = tasep_observation(curved, 0.3, 777.0, u);
    const double T23 = std::pow(777.0, 2.0 / 3.0), T13 = std::cbrt(777.0);
    const double pi = curved.value(), d1 = curved.d1(), d2 = curved.d2();
    const double t = (pi + 0.1) * 777.0 - (d1 + 1) * u * T23 + 0.5 * d2 * u * u * T13;
    const double n = (pi - 0.1) * 777.0 + (1 - d1) * u * T23 + 0.5 * d2 * u * u * T13;
    CHECK(c.point.t <= t);
    CHECK(c.point.t > t - 1);
    CHECK(c.point.n <= n);
    CHECK(c.point.n > n - 1);
  }
  CHECK_THROWS_AS(tasep_observation(ft, 0.5, 0.5, 0.0), Error);
}

TEST_CASE("scaling coefficients") {
  const auto s = scaling_coeffs(SpaceLikePathSpec::fixed_time(), 0.25);
  CHECK(s.kappa_v == doctest::Approx(std::cbrt(3.0 / 8.0)).epsilon(1e-14));
  CHECK(s.kappa_v == doctest::Approx(0.72112).epsilon(1e-5));
  CHECK(s.kappa_h == doctest::Approx(0.52003).epsilon(1e-5));
  CHECK(s.v == doctest::Approx(0.5));

  // the two parametrisations agree on a (q, π') grid
  for (double q : {0.05, 0.2, 0.5, 0.8, 0.95})
    for (double slope : {-1.0, -0.4, 0.0, 0.6, 1.0}) {
      SpaceLikePathSpec p;
      p.pi = [slope](double th) { return 1.2 + slope * th; };
      p.pi_prime = slope;
      p.pi_second = 0.0;
      const auto c = scaling_coeffs(p, q);
      const double sq = std::sqrt(q);
      CHECK(std::abs(std::cbrt(c.kappa2) * sq / (1 + sq) - c.kappa_v) < 1e-12);
      CHECK(std::abs(std::pow(c.kappa2, 2.0 / 3.0) * q / c.kappa1 - c.kappa_h) < 1e-12);
    }
}

TEST_CASE("png observation points") {
  const auto g = PNGPathSpec::fixed_time();
  const auto o = png_observation(g, 500.0, 0.0);
  CHECK(o.point.x == 0.0);
  CHECK(o.point.t == 500.0);
  const auto o1 = png_observation(g, 1000.0, 1.0);
  CHECK(o1.point.x == doctest::Approx(100.0));
  CHECK(o1.point.t == 1000.0);
  CHECK(o1.rescale(2000) == 0.0);
  const auto s = png_scaling(g);
  CHECK(s.S_v == doctest::Approx(std::cbrt(2.0)));
  CHECK(s.S_h == doctest::Approx(s.S_v * s.S_v));
  CHECK_THROWS_AS(png_observation({-1.0, 0.0, 0.0}, 10.0, 0.0), Error);
  PNGPathSpec curved{1.0, 0.5, -0.2};
  const auto c = png_observation(curved, 8.0, 1.0);
  CHECK(c.point.t == doctest::Approx(8.0 + 0.5 * 4.0 - 0.1 * 2.0));
}

TEST_CASE("small convergence experiments report consistent cells") {
  ExperimentSpec e;
  e.kind = ExperimentKind::Tasep;
  e.q = 0.5;
  e.T_list = {20.0, 160.0};
  e.s_grid = {-1.0, 0.0, 1.0};
  e.samples = 20000;
  e.rng = {7, 0};
  e.table_step = 0.1;
  const auto r = convergence_experiment(e);
  REQUIRE(r.cells.size() == 2);
  REQUIRE(r.rows.size() == 6);
  CHECK(r.cells[1].ks < r.cells[0].ks + 2 * r.cells[1].band);
  CHECK(r.monotone);
  for (const auto& row : r.rows) {
    CHECK(row.exact >= 0.0);
    CHECK(row.exact <= 1.0);
    CHECK(std::abs(row.empirical - row.exact) <= row.ks + 1e-12);
  }
  CHECK(r.csv().rfind("# kpz-exactlab v1\nT,u,s,empirical,exact,ks\n", 0) == 0);
  CHECK(r.json_summary().find("\"monotone\": true") != std::string::npos);
  // deterministic in the seed
  CHECK(convergence_experiment(e).csv() == r.csv());

  ExperimentSpec p;
  p.kind = ExperimentKind::PNG;
  p.T_list = {10.0, 40.0};
  p.u_list = {0.0};
  p.s_grid = {0.0};
  p.samples = 4000;
  p.rng = {3, 0};
  p.table_step = 0.1;
  const auto pr = convergence_experiment(p);
  REQUIRE(pr.cells.size() == 2);
  CHECK(pr.monotone);
  CHECK(pr.cells[1].ks < 0.1);
}
