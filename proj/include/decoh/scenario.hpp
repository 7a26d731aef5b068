// Configuration-driven entry point: scenario files describe one model run
// (profile, environment, labels, grids, oracle settings); run() computes
// everything first and then writes all artifacts atomically, check() is the
// dry-run validator.  Both return a process exit status plus a JSON report
// instead of throwing.
#pragma once

#include <optional>
#include <string>

namespace decoh {

// Command-line overrides applied on top of the scenario file.
struct ScenarioOptions {
  std::optional<std::string> output_dir;
  std::optional<int> oracle_modes;
  std::optional<int> threads;
  bool strict = false;  // treat warnings as errors
};

// Exit statuses shared by the CLI: 0 success, 2 invalid configuration,
// 3 unbounded model, 4 numerical failure or failed invariant check.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigInvalid = 2;
inline constexpr int kExitModelUnbounded = 3;
inline constexpr int kExitNumericalFailure = 4;

struct RunReport {
  int exit_code = 0;
  std::string report_json;  // machine-readable summary or error report
};

RunReport run_scenario(const std::string& scenario_path,
                       const ScenarioOptions& opts);

RunReport check_scenario(const std::string& scenario_path,
                         const ScenarioOptions& opts);

}  // namespace decoh
