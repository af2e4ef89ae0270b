#pragma once

#include "clcons/run_config.hpp"

namespace clcons {

/// Exit codes shared by all subcommands:
///   0 pass, 1 analysis threshold failure, 2 configuration error,
///   3 runtime domain violation.
inline constexpr int kExitPass = 0;
inline constexpr int kExitThreshold = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;

int cmd_check_system(const RunConfig& config);
int cmd_generate(const RunConfig& config);
int cmd_analyze(const RunConfig& config);
int cmd_sweep(const RunConfig& config);

int run_command(const RunConfig& config);

}  // namespace clcons
