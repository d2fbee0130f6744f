#pragma once

#include "assortify/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace assortify::pipeline {

/// Exclusive per-output-directory lock (a .lock file created O_EXCL),
/// released on destruction. A held lock means another command is running
/// against the same directory.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& out_dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

/// All pipeline commands, in dependency order.
const std::vector<std::string>& command_names();

/// Executes one already-validated command against a loaded config. Throws on
/// failure; the caller maps exceptions to exit codes.
void run_command(const std::string& command, const config::PipelineConfig& cfg);

/// Full entry point: loads the config, takes the output lock, runs the
/// command, and maps errors to exit codes — 0 ok, 2 usage/config/schema
/// problems (diagnostic on stderr naming the key or file:line), 3 runtime
/// failures.
int run(const std::string& command,
        const std::optional<std::filesystem::path>& config_file,
        const std::vector<std::string>& overrides);

}  // namespace assortify::pipeline
