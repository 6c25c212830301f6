#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace crossfit::tools {

// Exit code contract: 0 success, 1 input error, 2 no solution / stuck / failed check,
// 3 degeneration.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNoSolution = 2;
inline constexpr int kExitDegenerate = 3;

struct RunResult {
  nlohmann::json report;  // full report, manifest not yet attached
  std::string raw;        // non-JSON payload (OBJ export); report ignored when set
  bool is_raw = false;
  int exit_code = kExitOk;
};

/// Executes a command on pre-parsed body documents with an options object. Both the
/// command line and `replay` funnel through here so a manifest reproduces its report.
RunResult run_command(const std::string& command, const std::vector<nlohmann::json>& bodies,
                      const nlohmann::json& options);

/// Wraps a result in its manifest: {command, bodies, options, seed, tool_version,
/// wall_time_ms}.
nlohmann::json attach_manifest(const nlohmann::json& report, const std::string& command,
                               const std::vector<nlohmann::json>& bodies,
                               const nlohmann::json& options, double wall_time_ms);

}  // namespace crossfit::tools
