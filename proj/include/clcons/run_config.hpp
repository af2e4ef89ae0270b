#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clcons/grid.hpp"
#include "clcons/system.hpp"

namespace clcons {

struct SystemConfig {
  std::string name = "burgers";
  double kappa = 1.0;
  double gamma0 = 1.5;
  int d = 1;
  double gamma = 0.5;
  std::string file;  // custom system definition
};

struct GridConfig {
  std::vector<int> points;
  std::vector<double> extent;
  std::vector<bool> periodic;

  Grid build() const { return Grid(points, extent, periodic); }
};

struct GeneratorConfig {
  std::string kind;
  double s = 0.4;
  int mode_count = 8;
  int component_count = 1;
  double u_left = 1.0, u_right = -1.0, x0 = 0.5;
  double low = -1.0, high = 1.0, interface_position = 0.25;
  double amplitude = 0.1;
  double end_time = 0.2;
  double cfl = 0.9;
  std::string initial;  // fv initial data: "riemann" or "file"
  std::vector<double> left_state, right_state;
  std::string initial_path;
};

struct TestFunctionConfig {
  std::vector<double> center;
  std::vector<double> radius;
};

struct OutputConfig {
  std::string json;
  std::string csv_prefix;
};

struct ThresholdConfig {
  std::optional<double> min_slope;
  std::optional<double> max_slope;
  std::optional<double> min_ratio_slope;
  std::optional<double> max_value;
};

/// One batch run, parsed strictly from JSON (unknown keys rejected) with
/// command-line overrides applied on top. The resolved form is embedded in
/// every report this run writes.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 7;
  int jobs = 0;
  bool force = false;
  int states = 1000;  // check-system sample count

  SystemConfig system;
  std::optional<GridConfig> grid;
  std::optional<GeneratorConfig> generator;
  std::string field_in;
  std::string field_out;

  std::vector<std::string> quantities;
  std::vector<double> epsilons;
  std::optional<std::pair<double, double>> epsilon_window;
  double epsilon = 0.0;  // analyze: single epsilon

  double p = 0.0;  // 0 = the natural default gamma+2
  double q = 0.0;  // 0 = the natural default (gamma+2)/(gamma+1)
  double s_exponent = 0.0;
  std::string kernel_profile = "tensor_bump";
  std::vector<double> region_margins;
  std::optional<TestFunctionConfig> test_function;
  OutputConfig output;
  std::map<std::string, ThresholdConfig> thresholds;
  double compatibility_threshold = 1e-8;
  double fd_threshold = 1e-5;

  nlohmann::json resolved;  // the config as actually used

  SystemSpec build_system() const;
};

RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Applies a "dotted.path=value" override; values parse as JSON when
/// possible, else as strings. Flags win over the file.
void apply_override(nlohmann::json& j, const std::string& assignment);

}  // namespace clcons
