#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "pspin/config.hpp"

namespace pspin::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitCondition = 3,
  kExitRuntime = 4,
  kExitIo = 5,
};

struct CommandResult {
  std::vector<std::filesystem::path> files;
  nlohmann::ordered_json summary;
  /// False when a check inside the command failed (verify residuals).
  bool passed = true;
};

/// Runs one command and writes its outputs. Throws on failure.
CommandResult run_command(Command command, const RunConfig& config);

/// run_command with errors mapped to exit codes and reported on `err`.
int execute(Command command, const RunConfig& config, std::ostream& err);

}  // namespace pspin::cli
