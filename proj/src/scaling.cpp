#include "kpz/scaling.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "kpz/error.hpp"
#include "kpz/stats.hpp"

namespace kpz {

double SpaceLikePathSpec::value() const {
  if (!pi) throw Error(ErrorKind::DomainError, "path function not set");
  return pi(theta);
}

double SpaceLikePathSpec::d1() const {
  if (pi_prime) return *pi_prime;
  const double h = fd_step;
  return (pi(theta + h) - pi(theta - h)) / (2 * h);
}

double SpaceLikePathSpec::d2() const {
  if (pi_second) return *pi_second;
  const double h = fd_step;
  return (pi(theta + h) - 2 * pi(theta) + pi(theta - h)) / (h * h);
}

void SpaceLikePathSpec::validate() const {
  const double d = d1();
  if (!(std::abs(d) <= 1.0 + 1e-12)) throw Error(ErrorKind::DomainError, "path slope must satisfy |pi'| <= 1");
  if (!(value() + theta > 0)) throw Error(ErrorKind::DomainError, "path must satisfy pi + theta > 0");
}

SpaceLikePathSpec SpaceLikePathSpec::fixed_time() {
  SpaceLikePathSpec s;
  s.pi = [](double th) { return 1.0 - th; };
  s.theta = 0.0;
  s.pi_prime = -1.0;
  s.pi_second = 0.0;
  return s;
}

SpaceLikePathSpec SpaceLikePathSpec::tagged_particle(double alpha, double theta) {
  SpaceLikePathSpec s;
  s.pi = [alpha](double th) { return alpha + th; };
  s.theta = theta;
  s.pi_prime = 1.0;
  s.pi_second = 0.0;
  return s;
}

double TasepObservation::rescale(int position) const {
  return (position - reference) / (-std::cbrt(T));
}

TasepObservation tasep_observation(const SpaceLikePathSpec& spec, double q, double T, double u) {
  spec.validate();
  ModelParams::from_q(q);
  if (!(T > 0)) throw Error(ErrorKind::DomainError, "T must be positive");
  const double pi = spec.value(), d1 = spec.d1(), d2 = spec.d2(), th = spec.theta;
  const double T23 = std::pow(T, 2.0 / 3.0), T13 = std::cbrt(T);
  const double curv = 0.5 * d2 * u * u * T13;
  const double t = std::floor((pi + th) * T - (d1 + 1) * u * T23 + curv);
  const double n = std::floor((pi - th) * T + (1 - d1) * u * T23 + curv);
  if (t < 0 || n < 1) throw Error(ErrorKind::OutOfRange, fmt::format("observation (n={}, t={}) outside n >= 1, t >= 0", n, t));
  if (t > 1e9 || n > 1e9) throw Error(ErrorKind::OutOfRange, "observation too large");
  TasepObservation obs;
  obs.point = {static_cast<int>(n), static_cast<int>(t)};
  obs.reference = -2.0 * n + (1.0 - std::sqrt(q)) * t;
  obs.T = T;
  return obs;
}

ScalingParams scaling_coeffs(const SpaceLikePathSpec& spec, double q) {
  spec.validate();
  ModelParams::from_q(q);
  const double a = spec.value() + spec.theta, d1 = spec.d1(), sq = std::sqrt(q);
  const double denom = (d1 + 1) * (1 - sq) / 2 + 1 - d1;
  ScalingParams s;
  s.q = q;
  s.v = 1 - sq;
  s.kappa_v = std::cbrt(a * (1 - q)) * std::pow(q, 1.0 / 6.0);
  s.kappa_h = std::pow(a * (1 - q), 2.0 / 3.0) * std::pow(q, -1.0 / 6.0) / denom;
  s.kappa1 = sq * (1 + sq) * (1 + sq) * denom;
  s.kappa2 = a * (1 - q) * std::pow(1 + sq, 3) / q;
  const double kv = std::cbrt(s.kappa2) * sq / (1 + sq);
  const double kh = std::pow(s.kappa2, 2.0 / 3.0) * q / s.kappa1;
  if (std::abs(kv - s.kappa_v) > 1e-12 * s.kappa_v || std::abs(kh - s.kappa_h) > 1e-12 * s.kappa_h)
    throw Error(ErrorKind::NumericalInconsistency, "scaling coefficient identities fail");
  return s;
}

double PNGScaledObservation::rescale(int height) const {
  return (height - 2.0 * point.t) / std::cbrt(T);
}

PNGScaledObservation png_observation(const PNGPathSpec& g, double T, double u) {
  if (!(T > 0)) throw Error(ErrorKind::DomainError, "T must be positive");
  const double T23 = std::pow(T, 2.0 / 3.0), T13 = std::cbrt(T);
  PNGScaledObservation obs;
  obs.point.x = u * T23;
  obs.point.t = g.gamma0 * T + g.gamma1 * u * T23 + 0.5 * g.gamma2 * u * u * T13;
  obs.T = T;
  if (!(obs.point.t > 0)) throw Error(ErrorKind::OutOfRange, "observation time must be positive");
  return obs;
}

ScalingParams png_scaling(const PNGPathSpec& g) {
  if (!(g.gamma0 > 0)) throw Error(ErrorKind::DomainError, "gamma(0) must be positive");
  ScalingParams s;
  s.q = 0.0;
  s.S_v = std::cbrt(2 * g.gamma0);
  s.S_h = s.S_v * s.S_v;
  return s;
}

namespace {

TabulatedCDF compute_airy_table(double tau, const ExperimentSpec& spec) {
  const int n = static_cast<int>(std::ceil((spec.table_hi - spec.table_lo) / spec.table_step)) + 1;
  const double step = (spec.table_hi - spec.table_lo) / (n - 1);
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i)
    values[i] = joint_prob_airy1(AiryObservation{{tau}, {spec.table_lo + i * step}}, spec.airy);
  for (int i = 1; i < n; ++i) values[i] = std::max(values[i], values[i - 1]);
  return TabulatedCDF(spec.table_lo, spec.table_hi, std::move(values));
}

// tables are reused across experiments in the same process
TabulatedCDF airy_table(double tau, const ExperimentSpec& spec) {
  using Key = std::tuple<double, double, double, double, double, int, int, double>;
  static std::map<Key, TabulatedCDF> cache;
  static std::mutex mutex;
  const Key key{tau, spec.table_lo, spec.table_hi, spec.table_step, spec.airy.length,
                spec.airy.panel_order, spec.airy.initial_panels, spec.airy.stability_tol};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  TabulatedCDF table = compute_airy_table(tau, spec);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace

ConvergenceReport convergence_experiment(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  if (spec.T_list.empty() || spec.u_list.empty())
    throw Error(ErrorKind::DomainError, "experiment needs T and u values");
  if (spec.samples <= 0) throw Error(ErrorKind::DomainError, "experiment needs samples");
  const bool tasep = spec.kind == ExperimentKind::Tasep;

  ConvergenceReport report;
  report.kind = spec.kind;
  report.scaling = tasep ? scaling_coeffs(spec.path, spec.q) : png_scaling(spec.gamma);
  const double vscale = tasep ? report.scaling.kappa_v : report.scaling.S_v;
  const double hscale = tasep ? report.scaling.kappa_h : report.scaling.S_h;

  std::map<double, TabulatedCDF> tables;
  auto table_for = [&](double u) -> const TabulatedCDF& {
    const double tau = hscale * u;
    auto it = tables.find(tau);
    if (it == tables.end()) it = tables.emplace(tau, airy_table(tau, spec)).first;
    return it->second;
  };

  for (std::size_t ti = 0; ti < spec.T_list.size(); ++ti) {
    const double T = spec.T_list[ti];
    RngSpec rng{spec.rng.seed, spec.rng.stream + ti};
    std::vector<std::vector<double>> rescaled(spec.u_list.size());
    std::vector<ConvergenceCell> cells(spec.u_list.size());
    if (tasep) {
      std::vector<TasepObservation> obs;
      std::vector<SpaceTimePoint> pts;
      for (double u : spec.u_list) {
        obs.push_back(tasep_observation(spec.path, spec.q, T, u));
        pts.push_back(obs.back().point);
      }
      const auto positions = sample_tasep_points(ModelParams::from_q(spec.q), pts, spec.samples, rng, spec.threads);
      for (std::size_t k = 0; k < obs.size(); ++k) {
        cells[k].tasep_point = obs[k].point;
        rescaled[k].reserve(spec.samples);
        for (int x : positions[k]) rescaled[k].push_back(obs[k].rescale(x));
      }
    } else {
      for (std::size_t k = 0; k < spec.u_list.size(); ++k) {
        const auto obs = png_observation(spec.gamma, T, spec.u_list[k]);
        cells[k].png_point = obs.point;
        RngSpec cell_rng{rng.seed, rng.stream * 1000003u + k};
        for (int h : sample_png_heights(obs.point.x, obs.point.t, spec.samples, cell_rng, spec.threads))
          rescaled[k].push_back(obs.rescale(h));
      }
    }
    for (std::size_t k = 0; k < spec.u_list.size(); ++k) {
      const double u = spec.u_list[k];
      const TabulatedCDF& table = table_for(u);
      auto exact = [&](double s) { return table(s / vscale); };
      const EmpiricalCDF emp(std::move(rescaled[k]));
      auto& cell = cells[k];
      cell.T = T;
      cell.u = u;
      cell.samples = spec.samples;
      cell.ks = ks_distance(emp, exact);
      cell.band = dkw_band(spec.samples);
      for (double s : spec.s_grid) report.rows.push_back({T, u, s, emp(s), exact(s), cell.ks});
      report.cells.push_back(cell);
    }
  }

  const std::size_t nu = spec.u_list.size();
  for (std::size_t ti = 1; ti < spec.T_list.size(); ++ti)
    for (std::size_t k = 0; k < nu; ++k) {
      const auto& prev = report.cells[(ti - 1) * nu + k];
      const auto& next = report.cells[ti * nu + k];
      if (!(next.ks < prev.ks + 2 * next.band)) report.monotone = false;
    }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string ConvergenceReport::csv() const {
  std::string out = "# kpz-exactlab v1\nT,u,s,empirical,exact,ks\n";
  for (const auto& r : rows)
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.T, r.u, r.s, r.empirical, r.exact, r.ks);
  return out;
}

std::string ConvergenceReport::json_summary() const {
  nlohmann::json j;
  j["kind"] = kind == ExperimentKind::Tasep ? "tasep" : "png";
  j["scaling"] = {{"q", scaling.q},           {"v", scaling.v},           {"kappa_v", scaling.kappa_v},
                  {"kappa_h", scaling.kappa_h}, {"kappa1", scaling.kappa1}, {"kappa2", scaling.kappa2},
                  {"S_v", scaling.S_v},       {"S_h", scaling.S_h}};
  j["cells"] = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json cj{{"T", c.T}, {"u", c.u}, {"samples", c.samples}, {"ks", c.ks}, {"band", c.band}};
    if (kind == ExperimentKind::Tasep)
      cj["point"] = {{"n", c.tasep_point.n}, {"t", c.tasep_point.t}};
    else
      cj["point"] = {{"x", c.png_point.x}, {"t", c.png_point.t}};
    j["cells"].push_back(cj);
  }
  j["monotone"] = monotone;
  j["seconds"] = seconds;
  return j.dump(2);
}

double estimate_runtime(const ExperimentSpec& spec) {
  double total = 0.0;
  for (double T : spec.T_list) {
    const double per_cell = spec.kind == ExperimentKind::Tasep
                                ? 1.5 * (static_cast<double>(spec.samples) / 64.0) * T * T * 3e-9
                                : static_cast<double>(spec.samples) * 2.0 * T * T * 3e-8;
    total += per_cell * (spec.kind == ExperimentKind::Tasep ? 1.0 : spec.u_list.size());
  }
  return total + 5.0;
}

}  // namespace kpz
