#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "desctrack/evaluation.hpp"
#include "desctrack/tracker.hpp"

namespace desctrack {

/// Everything a benchmark run is parameterized by.
struct RunConfig {
  TrackerConfig tracker;  ///< includes detector and matcher sections
  EvalConfig eval;

  void validate() const;
};

/// Flat `section.key = value` text; '#' starts a comment line. Keys not listed
/// by config_keys() are rejected with a ConfigError naming the line.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Every key with its current value, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_snapshot(const RunConfig& cfg);
std::vector<std::string> config_keys();

}  // namespace desctrack
