#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hjlab/config.hpp"

namespace hjlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,  // invalid config, or failed checks under verify
  kExitDivergence = 2,  // solve / functional only
  kExitInternal = 3,
};

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  int threads = 0;  // 0: HJLAB_THREADS, then hardware concurrency
  std::optional<std::uint64_t> seed;
};

struct CommandResult {
  int status = kExitOk;
  std::string directory;
  std::vector<std::string> files;  // relative to directory, manifest last
  std::string summary;
};

// Applies --out and --seed on top of the loaded config.
RunConfig resolve_config(const CommandOptions& opts);
int resolve_threads(int requested);

// Cartesian product horizon x alpha x scale x terminal kind; empty lists use the base value.
std::vector<ScenarioConfig> sweep_points(const RunConfig& rc);

CommandResult cmd_verify(const RunConfig& rc);
CommandResult cmd_solve(const RunConfig& rc);
CommandResult cmd_functional(const RunConfig& rc);
CommandResult cmd_sweep(const RunConfig& rc);

// Full command dispatch with error classification into exit codes.
int run_command(const std::string& command, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace hjlab
