// SPDX-License-Identifier: Apache-2.0
//
// JSON form of EngineConfig. Keys mirror the parameter structs; any key left
// out keeps the value of the base configuration.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ranopt/pipeline.hpp"

namespace ranopt {

/// Applies the keys of a JSON object onto `base`. Throws Error(validation)
/// naming the offending key path for unknown keys or ill-typed values.
EngineConfig apply_config_json(std::string_view json_text, EngineConfig base = {});
EngineConfig load_config_file(const std::filesystem::path& path, EngineConfig base = {});

/// Full configuration as a JSON object (sorted keys, two-space indent).
std::string config_to_json(const EngineConfig& config);

}  // namespace ranopt
