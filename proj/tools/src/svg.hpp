#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace sgdiff::tool {

struct Bar {
    std::string label;
    double value = 0.0;  // in [0, 1]
};

// Self-contained SVG bar chart. Uses only svg, rect, line and text elements;
// every data bar carries class="bar". A single generated-at comment line is
// the only non-deterministic content.
std::string render_bar_chart(const std::vector<Bar>& bars, const std::string& title,
                             const std::string& timestamp);

void write_bar_chart(const std::filesystem::path& path, const std::vector<Bar>& bars,
                     const std::string& title);

}  // namespace sgdiff::tool
