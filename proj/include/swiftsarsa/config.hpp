#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "swiftsarsa/harness.hpp"

namespace swiftsarsa {

// Flat `key = value` config files: one dotted key per line, `#` comments,
// space-separated lists. Every key maps one-to-one onto a run/env/agent
// field; unknown keys are rejected with the full list of valid keys.
struct ConfigEntry {
  std::string value;
  std::size_t line = 0;  // 0 for command-line overrides
};
using ConfigMap = std::map<std::string, ConfigEntry>;

ConfigMap load_config_file(const std::string& path);

/// Applies `key=value` strings (CLI --set) on top of a loaded map.
void apply_overrides(ConfigMap& config,
                     const std::vector<std::string>& overrides);

struct ResolvedConfig {
  RunConfig run;
  SweepGrid sweep;  // base mirrors run; axes default to run's single values
};

/// Turns a key/value map into validated configs. Throws
/// std::invalid_argument with the offending key and line on any problem.
ResolvedConfig resolve_config(const ConfigMap& config);

/// Every key with its resolved value, in registry order (for manifests).
std::vector<std::pair<std::string, std::string>> config_key_values(
    const ResolvedConfig& resolved);

/// Registry order, for error messages and docs.
std::vector<std::string> valid_config_keys();

}  // namespace swiftsarsa
