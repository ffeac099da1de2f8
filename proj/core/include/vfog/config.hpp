#pragma once

#include <string>

#include "vfog/engine.hpp"

namespace vfog {

// Strict JSON configuration: unknown keys and out-of-range values raise
// ConfigError naming the offending key path. Defaults depend on the
// subcommand and are written back by config_to_json.
SimConfig parse_config(const std::string& json_text);
SimConfig load_config(const std::string& path);

// Canonical JSON of every field, defaults included. Parsing the result
// yields an identical configuration.
std::string config_to_json(const SimConfig& config);

}  // namespace vfog
