#include "manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "sgdiff/version.hpp"

namespace sgdiff::tool {

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

void write_manifest(const std::filesystem::path& primary_output, const std::string& command,
                    nlohmann::json details) {
    nlohmann::json j;
    j["schema"] = "sgdiff-manifest-v1";
    j["tool_version"] = kVersion;
    j["command"] = command;
    j["timestamp"] = utc_timestamp();
    j["details"] = std::move(details);

    std::filesystem::path path = primary_output;
    path += ".manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write manifest: " + path.string());
    }
    out << j.dump(2) << "\n";
}

}  // namespace sgdiff::tool
