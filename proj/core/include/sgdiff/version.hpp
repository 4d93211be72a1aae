#pragma once

namespace sgdiff {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sgdiff
