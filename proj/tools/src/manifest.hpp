#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace sgdiff::tool {

// Sidecar manifest describing one command invocation: the resolved inputs,
// outputs and parameters needed to reproduce the artifact bit for bit.
// Written next to the primary output as <output>.manifest.json.
void write_manifest(const std::filesystem::path& primary_output, const std::string& command,
                    nlohmann::json details);

std::string utc_timestamp();

}  // namespace sgdiff::tool
