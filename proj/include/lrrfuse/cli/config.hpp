#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>

#include "lrrfuse/fusion.hpp"

namespace lrrfuse::cli {

/// Every effective setting, keyed by its flag name with dashes as underscores.
nlohmann::json config_to_json(const FusionConfig& config);

/// Overrides the fields present in `json`. Unknown keys and wrongly typed
/// values throw ParameterError.
void apply_config_json(const nlohmann::json& json, FusionConfig& config);

/// Reads a JSON config file on top of `config`. Missing file throws IoError,
/// malformed JSON throws FormatError.
void apply_config_file(const std::filesystem::path& path, FusionConfig& config);

}  // namespace lrrfuse::cli
