#include <cstdio>
#include <fstream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "kpz/error.hpp"
#include "kpz/harness.hpp"

using namespace kpz;

namespace {

struct Overrides {
  std::string config;
  std::optional<double> q, tol;
  std::optional<std::int64_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out, model;
  bool quiet = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON run configuration or manifest");
  sub->add_option("--q", o.q, "hopping failure probability");
  sub->add_option("--seed", o.seed);
  sub->add_option("--samples", o.samples);
  sub->add_option("--tol", o.tol, "truncation stability / deterministic comparison tolerance");
  sub->add_option("--out", o.out, "output path prefix");
  sub->add_option("--threads", o.threads, "worker threads (default: available cores)");
  sub->add_option("--model", o.model, "tasep | growth | png | airy1");
  sub->add_flag("--quiet", o.quiet, "suppress the summary line");
}

RunConfig assemble(const std::string& command, const Overrides& o) {
  RunConfig cfg;
  bool threads_set = false;
  if (!o.config.empty()) {
    std::ifstream f(o.config);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot read " + o.config);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::ConfigError, o.config + ": " + e.what());
    }
    cfg = RunConfig::from_json(j);
    const auto& body = j.contains("config") ? j.at("config") : j;
    threads_set = body.contains("threads");
  }
  cfg.command = command;
  if (o.q) cfg.q = *o.q;
  if (o.tol) cfg.tol = *o.tol;
  if (o.samples) cfg.samples = *o.samples;
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.out = *o.out;
  if (o.model) cfg.model = *o.model;
  if (o.threads) cfg.threads = *o.threads;
  else if (!threads_set) cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact formulas and simulations for discrete-time TASEP, PNG and the Airy1 process"};
  app.require_subcommand(1);
  Overrides o;
  for (const char* name : {"exact", "simulate", "compare", "converge", "selftest"}) add_common(app.add_subcommand(name), o);
  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig cfg = assemble(command, o);
    const CommandResult res = run_command(cfg);
    if (!o.quiet) {
      if (!res.message.empty()) std::printf("%s\n", res.message.c_str());
      for (const auto& f : res.files) std::printf("wrote %s\n", f.c_str());
    }
    return res.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
