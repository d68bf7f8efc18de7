#pragma once

#include <filesystem>

#include "otcl/io.hpp"

namespace otcl {

// Exit codes of run_config / the CLI.
enum ExitCode : int {
  kExitPass = 0,
  kExitFail = 1,
  kExitVacuous = 2,
  kExitError = 3,
  kExitSchema = 4,
};

struct RunOptions {
  std::filesystem::path out_dir = "reports";
  std::uint64_t seed = 0;
  bool parallel_tasks = false;
  double tolerance = std::numeric_limits<double>::quiet_NaN();  // NaN = per-check default
  bool has_seed_override = false;
};

// Executes the tasks of a parsed config; writes one report per task plus a
// manifest into out_dir. Schema violations exit with kExitSchema before any
// output is produced.
int run_config_json(const Json& config, const RunOptions& opts);

// Loads the config file (its hash lands in the manifest) and runs it.
int run_config(const std::filesystem::path& config_path, RunOptions opts);

}  // namespace otcl
