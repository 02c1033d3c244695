#include "kpz/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "kpz/checks.hpp"
#include "kpz/dynamics.hpp"
#include "kpz/error.hpp"
#include "kpz/fredholm.hpp"
#include "kpz/scaling.hpp"
#include "kpz/stats.hpp"

namespace kpz {

using nlohmann::json;

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

const std::set<std::string> kCommands{"exact", "simulate", "compare", "converge", "selftest"};
const std::set<std::string> kModels{"tasep", "growth", "png", "airy1"};
const std::set<std::string> kSources{"exact", "simulate", "brute", "file"};

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e9; }

std::vector<int> finite_positions(const RunConfig& cfg) {
  if (!cfg.y.empty()) return cfg.y;
  std::vector<int> y(cfg.N);
  for (int k = 1; k <= cfg.N; ++k) y[k - 1] = -2 * k;
  return y;
}

bool alternating_finite(const RunConfig& cfg) {
  const auto y = finite_positions(cfg);
  for (std::size_t k = 0; k < y.size(); ++k)
    if (y[k] != -2 * static_cast<int>(k + 1)) return false;
  return true;
}

// Cartesian product of the per-point cut lists, last point fastest
std::vector<std::vector<double>> cut_rows(const RunConfig& cfg) {
  std::vector<std::vector<double>> rows{{}};
  for (const auto& p : cfg.points) {
    std::vector<std::vector<double>> next;
    for (const auto& r : rows)
      for (double c : p.cuts) {
        auto e = r;
        e.push_back(c);
        next.push_back(std::move(e));
      }
    rows = std::move(next);
  }
  return rows;
}

std::vector<SpaceTimePoint> tasep_points(const RunConfig& cfg) {
  std::vector<SpaceTimePoint> pts;
  for (const auto& p : cfg.points) pts.push_back({p.n, static_cast<int>(p.t)});
  return pts;
}

std::vector<int> int_cuts(const std::vector<double>& row) {
  std::vector<int> out;
  for (double c : row) out.push_back(static_cast<int>(c));
  return out;
}

// exact probability of one cut row plus metadata
FredholmResult exact_row(const RunConfig& cfg, const std::vector<double>& row) {
  FredholmOptions opts;
  opts.stability_tol = cfg.tol;
  opts.threads = cfg.threads;
  const ModelParams mp{cfg.q};
  if (cfg.model == "tasep") {
    const ObservationPath path{tasep_points(cfg), int_cuts(row)};
    if (cfg.initial == "finite") {
      if (!alternating_finite(cfg)) config_error("exact finite-N probabilities need y_k = -2k");
      return joint_prob_tasep_detailed(path, mp, TasepKernel::finite(static_cast<int>(finite_positions(cfg).size())), opts);
    }
    return joint_prob_tasep_detailed(path, mp, TasepKernel::flat(), opts);
  }
  if (cfg.model == "growth") {
    std::vector<GrowthPoint> pts;
    for (std::size_t k = 0; k < cfg.points.size(); ++k)
      pts.push_back({static_cast<int>(cfg.points[k].x), static_cast<int>(cfg.points[k].t), static_cast<int>(row[k])});
    return joint_prob_growth_detailed(pts, mp, opts);
  }
  if (cfg.model == "png") {
    PNGObservation obs;
    for (const auto& p : cfg.points) obs.points.push_back({p.x, p.t});
    obs.cuts = int_cuts(row);
    return joint_prob_png_detailed(obs, PNGKernel::spacelike(), opts);
  }
  AiryObservation obs;
  for (const auto& p : cfg.points) obs.taus.push_back(p.tau);
  obs.cuts = row;
  AiryOptions ao;
  ao.stability_tol = cfg.tol;
  return joint_prob_airy1_detailed(obs, ao);
}

std::string window_text(const TruncationWindow& w) {
  std::string s;
  if (!w.nodes.empty()) {
    for (std::size_t k = 0; k < w.nodes.size(); ++k) s += fmt::format("{}nodes={}", k ? ";" : "", w.nodes[k].size());
  } else {
    for (std::size_t k = 0; k < w.lo.size(); ++k) s += fmt::format("{}{}:{}", k ? ";" : "", w.lo[k], w.hi[k]);
  }
  return s;
}

std::string cut_header(std::size_t m) {
  std::string s;
  for (std::size_t k = 1; k <= m; ++k) s += fmt::format("cut_{},", k);
  return s;
}

std::string cut_cells(const std::vector<double>& row) {
  std::string s;
  for (double c : row) s += format_double(c) + ",";
  return s;
}

void write_file(const std::string& path, const std::string& content, CommandResult& res) {
  std::ofstream f(path, std::ios::binary);
  if (!f) config_error("cannot write " + path);
  f << content;
  res.files.push_back(path);
}

struct Samples {
  std::vector<std::vector<int>> values;  // [point][sample]
  std::int64_t count = 0;
};

Samples simulate_samples(const RunConfig& cfg) {
  const ModelParams mp{cfg.q};
  const RngSpec rng{cfg.seed, cfg.stream};
  Samples out;
  out.count = cfg.samples;
  if (cfg.model == "tasep") {
    const auto pts = tasep_points(cfg);
    if (cfg.initial == "flat") {
      out.values = sample_tasep_points(mp, pts, cfg.samples, rng, cfg.threads);
      return out;
    }
    InitialCondition ic;
    ic.kind = InitialCondition::Kind::FiniteList;
    ic.y = finite_positions(cfg);
    int hi = 1, t_max = 0;
    for (const auto& p : pts) {
      hi = std::max(hi, p.n);
      t_max = std::max(t_max, p.t);
    }
    out.values.assign(pts.size(), std::vector<int>(cfg.samples));
    for (std::int64_t s = 0; s < cfg.samples; ++s) {
      const RngSpec sample_rng{cfg.seed, (cfg.stream << 32) + static_cast<std::uint64_t>(s)};
      const auto traj = simulate_tasep(mp, ic, LabelWindow{1, hi, 0}, t_max, sample_rng);
      for (std::size_t k = 0; k < pts.size(); ++k) out.values[k][s] = traj[pts[k].t].positions[pts[k].n - 1];
    }
    return out;
  }
  if (cfg.model == "growth") {
    std::vector<int> sites;
    for (const auto& p : cfg.points) {
      if (p.t != cfg.points.front().t)
        throw Error(ErrorKind::IncompatibleInputs, "growth sampling needs all points at one time");
      sites.push_back(static_cast<int>(p.x));
    }
    out.values = sample_growth_heights(mp, sites, static_cast<int>(cfg.points.front().t), cfg.samples, rng, cfg.threads);
    return out;
  }
  if (cfg.model == "png") {
    if (cfg.points.size() != 1) throw Error(ErrorKind::IncompatibleInputs, "PNG sampling is one-point");
    out.values = {sample_png_heights(cfg.points[0].x, cfg.points[0].t, cfg.samples, rng, cfg.threads)};
    return out;
  }
  throw Error(ErrorKind::IncompatibleInputs, "no sampler for the airy1 model");
}

// tasep events are x >= a, height events are h <= H
bool event(const std::string& model, int value, double cut) { return model == "tasep" ? value >= cut : value <= cut; }

double empirical(const RunConfig& cfg, const Samples& s, const std::vector<double>& row) {
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < s.count; ++i) {
    bool ok = true;
    for (std::size_t k = 0; k < row.size() && ok; ++k) ok = event(cfg.model, s.values[k][i], row[k]);
    hits += ok;
  }
  return static_cast<double>(hits) / static_cast<double>(s.count);
}

double brute_row(const RunConfig& cfg, const std::map<std::vector<int>, double>& law, const std::vector<double>& row) {
  double total = 0.0;
  for (const auto& [x, w] : law) {
    bool ok = true;
    for (std::size_t k = 0; k < row.size() && ok; ++k) ok = x[cfg.points[k].n - 1] >= row[k];
    if (ok) total += w;
  }
  return total;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Table read_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::IncompatibleInputs, "cannot read " + path);
  Table t;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!header_seen) {
      t.columns = cells;
      header_seen = true;
      continue;
    }
    std::vector<double> r;
    for (const auto& c : cells) {
      try {
        r.push_back(std::stod(c));
      } catch (...) {
        r.push_back(std::nan(""));
      }
    }
    t.rows.push_back(std::move(r));
  }
  return t;
}

int column(const Table& t, const std::string& name) {
  const auto it = std::find(t.columns.begin(), t.columns.end(), name);
  return it == t.columns.end() ? -1 : static_cast<int>(it - t.columns.begin());
}

struct SourceValues {
  std::vector<double> probs;
  bool sampled = false;
  std::int64_t samples = 0;
};

SourceValues evaluate_source(const RunConfig& cfg, const SourceSpec& src, const std::vector<std::vector<double>>& rows) {
  SourceValues out;
  if (src.source == "exact") {
    for (const auto& r : rows) out.probs.push_back(exact_row(cfg, r).probability);
  } else if (src.source == "simulate") {
    const auto s = simulate_samples(cfg);
    for (const auto& r : rows) out.probs.push_back(empirical(cfg, s, r));
    out.sampled = true;
    out.samples = s.count;
  } else if (src.source == "brute") {
    if (cfg.model != "tasep" || cfg.initial != "finite")
      throw Error(ErrorKind::IncompatibleInputs, "brute force needs a finite TASEP start");
    const int t = static_cast<int>(cfg.points.front().t);
    for (const auto& p : cfg.points)
      if (static_cast<int>(p.t) != t) throw Error(ErrorKind::IncompatibleInputs, "brute force needs one common time");
    const auto law = brute_force_law(ParticleConfig{finite_positions(cfg), 0}, t, ModelParams{cfg.q});
    for (const auto& r : rows) out.probs.push_back(brute_row(cfg, law, r));
  } else {
    const Table t = read_csv(src.path);
    const std::size_t m = cfg.points.size();
    if (column(t, "probability") >= 0) {
      for (std::size_t k = 1; k <= m; ++k)
        if (column(t, fmt::format("cut_{}", k)) != static_cast<int>(k - 1))
          throw Error(ErrorKind::IncompatibleInputs, src.path + ": cut columns do not match the observation points");
      if (column(t, fmt::format("cut_{}", m + 1)) >= 0)
        throw Error(ErrorKind::IncompatibleInputs, src.path + ": more points than the configuration");
      const int pc = column(t, "probability");
      for (const auto& r : rows) {
        const auto it = std::find_if(t.rows.begin(), t.rows.end(),
                                     [&](const auto& tr) { return std::equal(r.begin(), r.end(), tr.begin()); });
        if (it == t.rows.end()) throw Error(ErrorKind::IncompatibleInputs, src.path + ": missing cut row");
        out.probs.push_back((*it)[pc]);
      }
    } else if (column(t, "sample") == 0) {
      if (t.columns.size() != m + 1)
        throw Error(ErrorKind::IncompatibleInputs, src.path + ": sample columns do not match the observation points");
      Samples s;
      s.count = static_cast<std::int64_t>(t.rows.size());
      s.values.assign(m, std::vector<int>(t.rows.size()));
      for (std::size_t i = 0; i < t.rows.size(); ++i)
        for (std::size_t k = 0; k < m; ++k) s.values[k][i] = static_cast<int>(t.rows[i][k + 1]);
      if (s.count == 0) throw Error(ErrorKind::IncompatibleInputs, src.path + ": no samples");
      for (const auto& r : rows) out.probs.push_back(empirical(cfg, s, r));
      out.sampled = true;
      out.samples = s.count;
    } else {
      throw Error(ErrorKind::IncompatibleInputs, src.path + ": neither an exact table nor a sample file");
    }
  }
  return out;
}

json point_json(const PointSpec& p) { return {{"n", p.n}, {"x", p.x}, {"t", p.t}, {"tau", p.tau}, {"cuts", p.cuts}}; }

PointSpec point_from_json(const json& j) {
  PointSpec p;
  p.n = j.value("n", 1);
  p.x = j.value("x", 0.0);
  p.t = j.value("t", 0.0);
  p.tau = j.value("tau", 0.0);
  if (j.contains("cuts")) p.cuts = j.at("cuts").get<std::vector<double>>();
  if (j.contains("cut_range")) {
    const auto& r = j.at("cut_range");
    const double lo = r.at("lo").get<double>(), hi = r.at("hi").get<double>(), step = r.value("step", 1.0);
    if (!(step > 0) || hi < lo) config_error("cut_range needs lo <= hi and step > 0");
    for (int i = 0; lo + i * step <= hi + 1e-12; ++i) p.cuts.push_back(lo + i * step);
  }
  return p;
}

}  // namespace

void RunConfig::validate() const {
  if (!command.empty() && !kCommands.count(command)) config_error("unknown command '" + command + "'");
  if (!kModels.count(model)) config_error("model must be one of tasep, growth, png, airy1");
  if (!(q > 0.0 && q < 1.0)) config_error("q must lie in (0, 1)");
  if (!(tol > 0.0)) config_error("tol must be positive");
  if (samples <= 0) config_error("samples must be positive");
  if (threads < 1) config_error("threads must be at least 1");
  if (initial != "flat" && initial != "finite") config_error("initial must be flat or finite");
  if (!kSources.count(reference.source) || !kSources.count(candidate.source))
    config_error("compare sources must be exact, simulate, brute or file");
  if (initial == "finite") {
    const auto ys = finite_positions(*this);
    if (ys.empty()) config_error("finite start needs N >= 1 or explicit y");
    for (std::size_t k = 1; k < ys.size(); ++k)
      if (ys[k] >= ys[k - 1]) config_error("starting positions y must be strictly decreasing");
    for (const auto& p : points)
      if (p.n > static_cast<int>(ys.size())) config_error("label exceeds the number of particles");
  }
  const bool needs_points = command != "converge" && command != "selftest";
  if (needs_points && points.empty()) config_error("at least one observation point is required");
  for (const auto& p : points) {
    if (needs_points && p.cuts.empty()) config_error("every point needs at least one cut");
    if (model == "tasep" || model == "growth") {
      if (!is_integer(p.t) || p.t < 0) config_error("lattice times must be nonnegative integers");
      for (double c : p.cuts)
        if (!is_integer(c)) config_error("lattice cuts must be integers");
    }
    if (model == "growth" && !is_integer(p.x)) config_error("growth sites must be integers");
    if (model == "png") {
      for (double c : p.cuts)
        if (!is_integer(c)) config_error("PNG heights must be integers");
    }
  }
  if (needs_points) {
    // model-level invariants on the first cut row
    std::vector<double> row;
    for (const auto& p : points) row.push_back(p.cuts.front());
    try {
      if (model == "tasep") {
        ModelParams{q}.validate();
        ObservationPath{tasep_points(*this), int_cuts(row)}.validate();
      } else if (model == "png") {
        PNGObservation obs;
        for (const auto& p : points) obs.points.push_back({p.x, p.t});
        obs.cuts = int_cuts(row);
        obs.validate();
      } else if (model == "airy1") {
        AiryObservation obs;
        for (const auto& p : points) obs.taus.push_back(p.tau);
        obs.cuts = row;
        obs.validate();
      } else {
        std::vector<GrowthPoint> gp;
        for (std::size_t k = 0; k < points.size(); ++k)
          gp.push_back({static_cast<int>(points[k].x), static_cast<int>(points[k].t), static_cast<int>(row[k])});
        growth_to_tasep_path(gp).validate();
      }
    } catch (const Error& e) {
      config_error(e.what());
    }
  }
  if (command == "converge") {
    if (converge.kind != "tasep" && converge.kind != "png") config_error("converge.kind must be tasep or png");
    if (converge.path != "fixed_time" && converge.path != "tagged") config_error("converge.path must be fixed_time or tagged");
    if (converge.T.empty() || converge.u.empty() || converge.s.empty()) config_error("converge needs T, u and s values");
    for (double T : converge.T)
      if (!(T > 0)) config_error("converge.T values must be positive");
    if (!(converge.table_step > 0)) config_error("converge.table_step must be positive");
    if (converge.gamma.size() != 3 || !(converge.gamma[0] > 0)) config_error("converge.gamma is [g(0), g'(0), g''(0)], g(0) > 0");
  }
}

json RunConfig::to_json() const {
  json j;
  j["command"] = command;
  j["model"] = model;
  j["q"] = q;
  j["initial"] = initial;
  j["y"] = y;
  j["N"] = N;
  j["points"] = json::array();
  for (const auto& p : points) j["points"].push_back(point_json(p));
  j["tol"] = tol;
  j["samples"] = samples;
  j["seed"] = seed;
  j["stream"] = stream;
  j["threads"] = threads;
  j["out"] = out;
  j["reference"] = {{"source", reference.source}, {"path", reference.path}};
  j["candidate"] = {{"source", candidate.source}, {"path", candidate.path}};
  j["converge"] = {{"kind", converge.kind}, {"path", converge.path}, {"alpha", converge.alpha}, {"gamma", converge.gamma},
                   {"T", converge.T},       {"u", converge.u},       {"s", converge.s},
                   {"table_step", converge.table_step}};
  return j;
}

RunConfig RunConfig::from_json(const json& root) {
  const json& j = root.contains("config") ? root.at("config") : root;
  RunConfig c;
  try {
    c.command = j.value("command", c.command);
    c.model = j.value("model", c.model);
    c.q = j.value("q", c.q);
    c.initial = j.value("initial", c.initial);
    c.y = j.value("y", c.y);
    c.N = j.value("N", c.N);
    if (j.contains("points"))
      for (const auto& p : j.at("points")) c.points.push_back(point_from_json(p));
    c.tol = j.value("tol", c.tol);
    c.samples = j.value("samples", c.samples);
    c.seed = j.value("seed", c.seed);
    c.stream = j.value("stream", c.stream);
    c.threads = j.value("threads", c.threads);
    c.out = j.value("out", c.out);
    auto source = [](const json& s, SourceSpec d) {
      if (s.is_string()) return SourceSpec{s.get<std::string>(), ""};
      return SourceSpec{s.value("source", d.source), s.value("path", d.path)};
    };
    if (j.contains("reference")) c.reference = source(j.at("reference"), c.reference);
    if (j.contains("candidate")) c.candidate = source(j.at("candidate"), c.candidate);
    if (j.contains("converge")) {
      const auto& v = j.at("converge");
      c.converge.kind = v.value("kind", c.converge.kind);
      c.converge.path = v.value("path", c.converge.path);
      c.converge.alpha = v.value("alpha", c.converge.alpha);
      c.converge.gamma = v.value("gamma", c.converge.gamma);
      c.converge.T = v.value("T", c.converge.T);
      c.converge.u = v.value("u", c.converge.u);
      c.converge.s = v.value("s", c.converge.s);
      c.converge.table_step = v.value("table_step", c.converge.table_step);
    }
  } catch (const json::exception& e) {
    config_error(std::string("malformed configuration: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) config_error("cannot read " + path);
  try {
    return from_json(json::parse(f));
  } catch (const json::parse_error& e) {
    config_error(path + ": " + e.what());
  }
}

CommandResult cmd_exact(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto rows = cut_rows(cfg);
  std::string csv = std::string(kCsvHeader) + "\n" + cut_header(cfg.points.size()) + "probability,raw,converged,doublings,window\n";
  for (const auto& r : rows) {
    const auto res = exact_row(cfg, r);
    csv += fmt::format("{}{},{},{},{},{}\n", cut_cells(r), format_double(res.probability), format_double(res.raw),
                       res.window.converged ? 1 : 0, res.window.doublings, window_text(res.window));
  }
  CommandResult out;
  write_file(cfg.out + ".exact.csv", csv, out);
  json manifest{{"config", cfg.to_json()},
                {"rows", rows.size()},
                {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  write_file(cfg.out + ".exact.json", manifest.dump(2) + "\n", out);
  out.message = fmt::format("{} rows", rows.size());
  return out;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Samples s = simulate_samples(cfg);
  const std::size_t m = cfg.points.size();
  std::string csv = std::string(kCsvHeader) + "\nsample";
  for (std::size_t k = 1; k <= m; ++k) csv += fmt::format(",v_{}", k);
  csv += "\n";
  std::vector<std::map<int, std::int64_t>> hist(m);
  for (std::int64_t i = 0; i < s.count; ++i) {
    csv += std::to_string(i);
    for (std::size_t k = 0; k < m; ++k) {
      csv += "," + std::to_string(s.values[k][i]);
      ++hist[k][s.values[k][i]];
    }
    csv += "\n";
  }
  std::string h = std::string(kCsvHeader) + "\npoint,value,count\n";
  for (std::size_t k = 0; k < m; ++k)
    for (const auto& [v, c] : hist[k]) h += fmt::format("{},{},{}\n", k + 1, v, c);
  CommandResult out;
  write_file(cfg.out + ".samples.csv", csv, out);
  write_file(cfg.out + ".hist.csv", h, out);
  json manifest{{"config", cfg.to_json()},
                {"seed", cfg.seed},
                {"streams", {{"stream", cfg.stream}, {"batches", (s.count + 63) / 64}}},
                {"samples", s.count},
                {"files", out.files},
                {"wall_seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
  write_file(cfg.out + ".manifest.json", manifest.dump(2) + "\n", out);
  out.message = fmt::format("{} samples", s.count);
  return out;
}

CommandResult cmd_compare(const RunConfig& cfg) {
  cfg.validate();
  const auto rows = cut_rows(cfg);
  const auto ref = evaluate_source(cfg, cfg.reference, rows);
  const auto cand = evaluate_source(cfg, cfg.candidate, rows);
  if (ref.sampled && cand.sampled) throw Error(ErrorKind::IncompatibleInputs, "compare needs at least one exact side");
  const auto& exact = ref.sampled ? cand : ref;
  const auto& other = ref.sampled ? ref : cand;
  const std::int64_t n = other.sampled ? other.samples : cfg.samples;
  std::string csv = std::string(kCsvHeader) + "\n" + cut_header(cfg.points.size()) + "reference,candidate,diff,z,flag\n";
  double max_diff = 0.0, max_z = 0.0;
  int flagged = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double diff = cand.probs[i] - ref.probs[i];
    // deterministic pairs agreeing within tol count as z = 0
    const bool within = !other.sampled && std::abs(diff) <= cfg.tol;
    const double z = within ? 0.0 : binomial_z(other.probs[i], exact.probs[i], n);
    const bool flag = other.sampled ? z > 4.0 : !within;
    max_diff = std::max(max_diff, std::abs(diff));
    max_z = std::max(max_z, z);
    flagged += flag;
    csv += fmt::format("{}{},{},{},{},{}\n", cut_cells(rows[i]), format_double(ref.probs[i]), format_double(cand.probs[i]),
                       format_double(diff), format_double(z), flag ? 1 : 0);
  }
  CommandResult out;
  write_file(cfg.out + ".compare.csv", csv, out);
  json summary{{"config", cfg.to_json()}, {"rows", rows.size()},   {"max_abs_diff", max_diff},
               {"max_z", max_z},          {"flagged", flagged},     {"sampled", other.sampled},
               {"samples", n}};
  write_file(cfg.out + ".compare.json", summary.dump(2) + "\n", out);
  out.exit_code = flagged ? 1 : 0;
  out.message = fmt::format("{} rows, max |diff| {:.3e}, max |z| {:.3f}, {} flagged", rows.size(), max_diff, max_z, flagged);
  return out;
}

CommandResult cmd_converge(const RunConfig& cfg) {
  cfg.validate();
  ExperimentSpec e;
  e.kind = cfg.converge.kind == "tasep" ? ExperimentKind::Tasep : ExperimentKind::PNG;
  e.path = cfg.converge.path == "tagged" ? SpaceLikePathSpec::tagged_particle(cfg.converge.alpha)
                                         : SpaceLikePathSpec::fixed_time();
  e.q = cfg.q;
  e.gamma = {cfg.converge.gamma[0], cfg.converge.gamma[1], cfg.converge.gamma[2]};
  e.T_list = cfg.converge.T;
  e.u_list = cfg.converge.u;
  e.s_grid = cfg.converge.s;
  e.samples = cfg.samples;
  e.rng = {cfg.seed, cfg.stream};
  e.threads = cfg.threads;
  e.table_step = cfg.converge.table_step;
  const double estimate = estimate_runtime(e);
  const auto report = convergence_experiment(e);
  CommandResult out;
  write_file(cfg.out + ".converge.csv", report.csv(), out);
  json summary = json::parse(report.json_summary());
  summary["config"] = cfg.to_json();
  summary["estimated_seconds"] = estimate;
  write_file(cfg.out + ".converge.json", summary.dump(2) + "\n", out);
  out.message = fmt::format("{} cells, monotone: {}", report.cells.size(), report.monotone ? "yes" : "no");
  return out;
}

CommandResult cmd_selftest(const RunConfig& cfg) {
  cfg.validate();
  CommandResult out;
  int failed = 0;
  for (const auto& r : run_selftest(cfg.threads)) {
    out.message += format_check(r) + "\n";
    failed += !r.passed;
  }
  out.exit_code = failed ? 1 : 0;
  out.message += fmt::format("{} failed", failed);
  return out;
}

CommandResult run_command(const RunConfig& cfg) {
  if (cfg.command == "exact") return cmd_exact(cfg);
  if (cfg.command == "simulate") return cmd_simulate(cfg);
  if (cfg.command == "compare") return cmd_compare(cfg);
  if (cfg.command == "converge") return cmd_converge(cfg);
  if (cfg.command == "selftest") return cmd_selftest(cfg);
  config_error("unknown command '" + cfg.command + "'");
}

}  // namespace kpz
