#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace authpipe {

struct GlobalConfig {
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path results_dir = "results";
  std::uint64_t master_seed = 0;
  int worker_count = 1;
};

// Precedence: explicit flags > AUTHPIPE_CACHE > config file > defaults.
GlobalConfig load_global_config(const std::filesystem::path& config_file);

// Runs one subcommand. Returns 0 on success, 1 on validation errors,
// 2 on runtime failures. Diagnostics go to stderr.
int dispatch(const std::vector<std::string>& args);

}  // namespace authpipe
