#pragma once

#include <filesystem>
#include <string>

#include "sgdiff/guidance.hpp"

namespace sgdiff {

std::string to_string(GuidanceMode mode);
GuidanceMode mode_from_string(const std::string& s);

std::string to_string(ScaleClip clip);
ScaleClip scale_clip_from_string(const std::string& s);

// Flat key = value file with the keys
//   mode, s_g, s_S, lambda, delta, s_m, beta_m, scale_clip
// Blank lines and lines starting with '#' are ignored; keys not present keep
// their defaults; unknown keys are rejected.
GuidanceConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const GuidanceConfig& config);

// Accepts a preset name (weak/medium/strong/max) or a path to a config file.
GuidanceConfig resolve_config(const std::string& name_or_path);

}  // namespace sgdiff
