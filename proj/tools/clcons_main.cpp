#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clcons/commands.hpp"
#include "clcons/run_config.hpp"
#include "clcons/system.hpp"

namespace {

using clcons::RunConfig;
using nlohmann::json;

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> overrides;
  std::int64_t seed = -1;
  int jobs = 0;
  bool force = false;
  std::string json_out;
  std::string csv_prefix;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON run configuration");
  cmd->add_option("--set", flags.overrides,
                  "override a config entry as dotted.path=value (flags win)");
  cmd->add_option("--seed", flags.seed, "random seed");
  cmd->add_option("--jobs", flags.jobs, "worker threads (default: CLCONS_JOBS or hardware)");
  cmd->add_flag("--force", flags.force, "overwrite existing outputs");
  cmd->add_option("--json", flags.json_out, "write the JSON report here");
  cmd->add_option("--csv-prefix", flags.csv_prefix, "write per-quantity CSV series here");
}

json load_base(const CommonFlags& flags, const std::string& command) {
  json j;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) throw std::invalid_argument("config: cannot open '" + flags.config_path + "'");
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
  }
  j["command"] = command;
  for (const std::string& assignment : flags.overrides) {
    clcons::apply_override(j, assignment);
  }
  if (flags.seed >= 0) j["seed"] = flags.seed;
  if (flags.jobs > 0) j["jobs"] = flags.jobs;
  if (flags.force) j["force"] = true;
  if (!flags.json_out.empty()) j["output"]["json"] = flags.json_out;
  if (!flags.csv_prefix.empty()) j["output"]["csv_prefix"] = flags.csv_prefix;
  return j;
}

int dispatch(const json& j) {
  const RunConfig config = clcons::parse_run_config(j);
  return clcons::run_command(config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clcons: companion-law conservation laboratory for systems of conservation laws"};
  app.require_subcommand(1);

  CommonFlags check_flags, gen_flags, analyze_flags, sweep_flags;

  auto* check = app.add_subcommand("check-system",
                                   "validate compatibility, growth and flux regularity");
  std::string system_name;
  double kappa = -1, gamma0 = -1, gamma = -1;
  int dim_d = 0, states = 0;
  std::string system_file;
  check->add_option("system", system_name, "burgers | euler | psystem | custom");
  check->add_option("--kappa", kappa, "euler pressure coefficient");
  check->add_option("--gamma0", gamma0, "euler polytropic exponent, in (1,2)");
  check->add_option("--d", dim_d, "space dimension");
  check->add_option("--gamma", gamma, "Hoelder exponent for psystem/custom");
  check->add_option("--states", states, "number of sampled states");
  check->add_option("--file", system_file, "custom system definition file");
  add_common(check, check_flags);

  auto* gen = app.add_subcommand("generate", "produce a field file from a generator spec");
  std::string out_path;
  gen->add_option("--out", out_path, "output .clf path");
  add_common(gen, gen_flags);

  auto* analyze = app.add_subcommand("analyze", "run analysis quantities at a single epsilon");
  std::string in_path_a;
  double epsilon_a = 0.0;
  std::vector<std::string> quantities_a;
  analyze->add_option("--in", in_path_a, "input .clf field");
  analyze->add_option("--epsilon", epsilon_a, "mollification radius");
  analyze->add_option("--quantity", quantities_a, "quantity name (repeatable)");
  add_common(analyze, analyze_flags);

  auto* sweep = app.add_subcommand("sweep", "epsilon sweeps with log-log fits and bounds");
  std::string in_path_s;
  double eps_min = 0.0, eps_max = 0.0;
  std::vector<std::string> quantities_s;
  std::string profile;
  sweep->add_option("--in", in_path_s, "input .clf field");
  sweep->add_option("--eps-min", eps_min, "dyadic window lower end");
  sweep->add_option("--eps-max", eps_max, "dyadic window upper end");
  sweep->add_option("--quantity", quantities_s, "quantity name (repeatable)");
  sweep->add_option("--profile", profile, "kernel profile: bump | tensor_bump");
  add_common(sweep, sweep_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    json j;
    if (check->parsed()) {
      j = load_base(check_flags, "check-system");
      if (!system_name.empty()) j["system"]["name"] = system_name;
      if (kappa > 0) j["system"]["kappa"] = kappa;
      if (gamma0 > 0) j["system"]["gamma0"] = gamma0;
      if (dim_d > 0) j["system"]["d"] = dim_d;
      if (gamma > 0) j["system"]["gamma"] = gamma;
      if (!system_file.empty()) j["system"]["file"] = system_file;
      if (states > 0) j["states"] = states;
    } else if (gen->parsed()) {
      j = load_base(gen_flags, "generate");
      if (!out_path.empty()) j["field_out"] = out_path;
    } else if (analyze->parsed()) {
      j = load_base(analyze_flags, "analyze");
      if (!in_path_a.empty()) j["field_in"] = in_path_a;
      if (epsilon_a > 0) j["epsilon"] = epsilon_a;
      if (!quantities_a.empty()) j["quantities"] = quantities_a;
    } else if (sweep->parsed()) {
      j = load_base(sweep_flags, "sweep");
      if (!in_path_s.empty()) j["field_in"] = in_path_s;
      if (eps_min > 0 && eps_max > 0) {
        j["epsilon_window"] = {{"min", eps_min}, {"max", eps_max}};
      }
      if (!quantities_s.empty()) j["quantities"] = quantities_s;
      if (!profile.empty()) j["kernel_profile"] = profile;
    }
    return dispatch(j);
  } catch (const clcons::DomainViolation& e) {
    std::cerr << "domain violation: " << e.what() << "\n";
    return clcons::kExitDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return clcons::kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return clcons::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 70;
  }
}
