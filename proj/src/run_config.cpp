#include "clcons/run_config.hpp"

#include <fstream>
#include <sstream>

namespace clcons {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  if (!obj.is_object()) {
    throw std::invalid_argument("config: " + where + " must be an object");
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "' in " + where);
  }
}

SystemConfig parse_system(const json& j) {
  reject_unknown(j, {"name", "kappa", "gamma0", "d", "gamma", "file"}, "system");
  SystemConfig cfg;
  cfg.name = j.value("name", cfg.name);
  cfg.kappa = j.value("kappa", cfg.kappa);
  cfg.gamma0 = j.value("gamma0", cfg.gamma0);
  cfg.d = j.value("d", cfg.d);
  cfg.gamma = j.value("gamma", cfg.gamma);
  cfg.file = j.value("file", cfg.file);
  return cfg;
}

GridConfig parse_grid(const json& j) {
  reject_unknown(j, {"points", "extent", "periodic"}, "grid");
  GridConfig cfg;
  cfg.points = j.at("points").get<std::vector<int>>();
  cfg.extent = j.at("extent").get<std::vector<double>>();
  cfg.periodic = j.at("periodic").get<std::vector<bool>>();
  return cfg;
}

GeneratorConfig parse_generator(const json& j) {
  reject_unknown(j,
                 {"kind", "s", "mode_count", "component_count", "u_left", "u_right", "x0", "low",
                  "high", "interface", "amplitude", "end_time", "cfl", "initial", "left_state",
                  "right_state", "initial_path"},
                 "generator");
  GeneratorConfig cfg;
  cfg.kind = j.at("kind").get<std::string>();
  cfg.s = j.value("s", cfg.s);
  cfg.mode_count = j.value("mode_count", cfg.mode_count);
  cfg.component_count = j.value("component_count", cfg.component_count);
  cfg.u_left = j.value("u_left", cfg.u_left);
  cfg.u_right = j.value("u_right", cfg.u_right);
  cfg.x0 = j.value("x0", cfg.x0);
  cfg.low = j.value("low", cfg.low);
  cfg.high = j.value("high", cfg.high);
  cfg.interface_position = j.value("interface", cfg.interface_position);
  cfg.amplitude = j.value("amplitude", cfg.amplitude);
  cfg.end_time = j.value("end_time", cfg.end_time);
  cfg.cfl = j.value("cfl", cfg.cfl);
  cfg.initial = j.value("initial", cfg.initial);
  if (j.contains("left_state")) cfg.left_state = j["left_state"].get<std::vector<double>>();
  if (j.contains("right_state")) cfg.right_state = j["right_state"].get<std::vector<double>>();
  cfg.initial_path = j.value("initial_path", cfg.initial_path);
  return cfg;
}

ThresholdConfig parse_threshold(const json& j, const std::string& where) {
  reject_unknown(j, {"min_slope", "max_slope", "min_ratio_slope", "max_value"}, where);
  ThresholdConfig cfg;
  if (j.contains("min_slope")) cfg.min_slope = j["min_slope"].get<double>();
  if (j.contains("max_slope")) cfg.max_slope = j["max_slope"].get<double>();
  if (j.contains("min_ratio_slope")) cfg.min_ratio_slope = j["min_ratio_slope"].get<double>();
  if (j.contains("max_value")) cfg.max_value = j["max_value"].get<double>();
  return cfg;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  reject_unknown(j,
                 {"command", "seed", "jobs", "force", "states", "system", "grid", "generator",
                  "field_in", "field_out", "quantities", "epsilons", "epsilon_window", "epsilon",
                  "exponents", "kernel_profile", "region_margins", "test_function", "output",
                  "thresholds", "compatibility_threshold", "fd_threshold"},
                 "top level");
  RunConfig cfg;
  cfg.command = j.value("command", std::string());
  cfg.seed = j.value("seed", cfg.seed);
  cfg.jobs = j.value("jobs", cfg.jobs);
  cfg.force = j.value("force", cfg.force);
  cfg.states = j.value("states", cfg.states);
  if (j.contains("system")) cfg.system = parse_system(j["system"]);
  if (j.contains("grid")) cfg.grid = parse_grid(j["grid"]);
  if (j.contains("generator")) cfg.generator = parse_generator(j["generator"]);
  cfg.field_in = j.value("field_in", cfg.field_in);
  cfg.field_out = j.value("field_out", cfg.field_out);
  if (j.contains("quantities")) cfg.quantities = j["quantities"].get<std::vector<std::string>>();
  if (j.contains("epsilons")) cfg.epsilons = j["epsilons"].get<std::vector<double>>();
  if (j.contains("epsilon_window")) {
    reject_unknown(j["epsilon_window"], {"min", "max"}, "epsilon_window");
    cfg.epsilon_window = {j["epsilon_window"].at("min").get<double>(),
                          j["epsilon_window"].at("max").get<double>()};
  }
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  if (j.contains("exponents")) {
    reject_unknown(j["exponents"], {"p", "q", "s"}, "exponents");
    cfg.p = j["exponents"].value("p", cfg.p);
    cfg.q = j["exponents"].value("q", cfg.q);
    cfg.s_exponent = j["exponents"].value("s", cfg.s_exponent);
  }
  cfg.kernel_profile = j.value("kernel_profile", cfg.kernel_profile);
  if (j.contains("region_margins")) {
    cfg.region_margins = j["region_margins"].get<std::vector<double>>();
  }
  if (j.contains("test_function")) {
    reject_unknown(j["test_function"], {"center", "radius"}, "test_function");
    TestFunctionConfig tf;
    tf.center = j["test_function"].at("center").get<std::vector<double>>();
    tf.radius = j["test_function"].at("radius").get<std::vector<double>>();
    cfg.test_function = tf;
  }
  if (j.contains("output")) {
    reject_unknown(j["output"], {"json", "csv_prefix"}, "output");
    cfg.output.json = j["output"].value("json", std::string());
    cfg.output.csv_prefix = j["output"].value("csv_prefix", std::string());
  }
  if (j.contains("thresholds")) {
    for (auto it = j["thresholds"].begin(); it != j["thresholds"].end(); ++it) {
      cfg.thresholds[it.key()] = parse_threshold(it.value(), "thresholds." + it.key());
    }
  }
  cfg.compatibility_threshold = j.value("compatibility_threshold", cfg.compatibility_threshold);
  cfg.fd_threshold = j.value("fd_threshold", cfg.fd_threshold);
  cfg.resolved = j;
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw std::invalid_argument("override must look like dotted.path=value: " + assignment);
  }
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  json* node = &j;
  std::istringstream segments(path);
  std::string key, prev_key;
  bool first = true;
  while (std::getline(segments, key, '.')) {
    if (!first) node = &((*node)[prev_key]);
    prev_key = key;
    first = false;
  }
  if (prev_key.empty()) throw std::invalid_argument("override: empty key path");
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    parsed = value;  // plain string
  }
  (*node)[prev_key] = parsed;
}

SystemSpec RunConfig::build_system() const {
  return make_named_system(system.name, system.kappa, system.gamma0, system.d, system.gamma,
                           system.file);
}

}  // namespace clcons
