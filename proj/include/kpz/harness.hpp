#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace kpz {

// One observation point; fields used depend on the model.
struct PointSpec {
  int n = 1;          // tasep label
  double x = 0.0;     // growth / png site
  double t = 0.0;     // time (integer for tasep / growth)
  double tau = 0.0;   // airy1
  std::vector<double> cuts;  // a_k (tasep), H_k (growth, png), s_k (airy1); rows use the Cartesian product
};

struct SourceSpec {
  std::string source;  // exact | simulate | brute | file
  std::string path;    // for source = file
};

struct ConvergeSpec {
  std::string kind = "tasep";        // tasep | png
  std::string path = "fixed_time";   // fixed_time | tagged
  double alpha = 1.0;                // tagged particle density of labels
  std::vector<double> gamma{1.0, 0.0, 0.0};
  std::vector<double> T{500.0, 2000.0};
  std::vector<double> u{0.0};
  std::vector<double> s{-1.0, 0.0, 1.0};
  double table_step = 0.02;  // Airy1 CDF tabulation step for the KS distance
};

struct RunConfig {
  std::string command;
  std::string model = "tasep";  // tasep | growth | png | airy1
  double q = 0.5;
  std::string initial = "flat";  // flat | finite (tasep)
  std::vector<int> y;             // finite starting positions, default y_k = -2k
  int N = 0;
  std::vector<PointSpec> points;
  double tol = 1e-8;
  std::int64_t samples = 10000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
  int threads = 1;
  std::string out = "kpz_out";
  SourceSpec reference{"exact", ""};
  SourceSpec candidate{"simulate", ""};
  ConvergeSpec converge;

  // raises ConfigError naming the violated invariant
  void validate() const;
  nlohmann::json to_json() const;
  // accepts a config object or a manifest carrying one under "config"
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig from_file(const std::string& path);
};

struct CommandResult {
  int exit_code = 0;
  std::vector<std::string> files;  // written paths
  std::string message;
};

inline constexpr const char* kCsvHeader = "# kpz-exactlab v1";

CommandResult cmd_exact(const RunConfig& cfg);
CommandResult cmd_simulate(const RunConfig& cfg);
CommandResult cmd_compare(const RunConfig& cfg);
CommandResult cmd_converge(const RunConfig& cfg);
CommandResult cmd_selftest(const RunConfig& cfg);
CommandResult run_command(const RunConfig& cfg);

// full-precision decimal
std::string format_double(double v);

}  // namespace kpz
