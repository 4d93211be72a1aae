#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace sgdiff::csv {

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF rows.
// Returns one vector of fields per row; blank trailing lines are dropped.
std::vector<std::vector<std::string>> read_file(const std::filesystem::path& path);
std::vector<std::vector<std::string>> parse(const std::string& text);

std::string escape(const std::string& field);
void write_row(std::ostream& out, std::span<const std::string> fields);

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

}  // namespace sgdiff::csv
