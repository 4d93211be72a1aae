#include "sgdiff/config_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sgdiff {

std::string to_string(GuidanceMode mode) {
    switch (mode) {
        case GuidanceMode::PlainCfg: return "plain-cfg";
        case GuidanceMode::Sld: return "sld";
        case GuidanceMode::NegativePrompt: return "negative-prompt";
    }
    throw std::invalid_argument("invalid guidance mode");
}

GuidanceMode mode_from_string(const std::string& s) {
    if (s == "plain-cfg") return GuidanceMode::PlainCfg;
    if (s == "sld") return GuidanceMode::Sld;
    if (s == "negative-prompt") return GuidanceMode::NegativePrompt;
    throw std::invalid_argument("unknown mode '" + s +
                                "' (valid: plain-cfg, sld, negative-prompt)");
}

std::string to_string(ScaleClip clip) {
    switch (clip) {
        case ScaleClip::PaperLiteral: return "paper-literal";
        case ScaleClip::UpperClipAt1: return "upper-clip-at-1";
    }
    throw std::invalid_argument("invalid scale_clip");
}

ScaleClip scale_clip_from_string(const std::string& s) {
    if (s == "paper-literal") return ScaleClip::PaperLiteral;
    if (s == "upper-clip-at-1") return ScaleClip::UpperClipAt1;
    throw std::invalid_argument("unknown scale_clip '" + s +
                                "' (valid: paper-literal, upper-clip-at-1)");
}

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': malformed number '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': malformed integer '" + value + "'");
    }
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

GuidanceConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path.string());
    }
    GuidanceConfig c;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                        ": expected 'key = value'");
        }
        std::string key = trim(stripped.substr(0, eq));
        std::string value = trim(stripped.substr(eq + 1));
        if (key == "mode") {
            c.mode = mode_from_string(value);
        } else if (key == "s_g") {
            c.text_scale = parse_double(key, value);
        } else if (key == "s_S") {
            c.safety_scale = parse_double(key, value);
        } else if (key == "lambda") {
            c.threshold = parse_double(key, value);
        } else if (key == "delta") {
            c.warmup_steps = parse_int(key, value);
        } else if (key == "s_m") {
            c.momentum_scale = parse_double(key, value);
        } else if (key == "beta_m") {
            c.momentum_decay = parse_double(key, value);
        } else if (key == "scale_clip") {
            c.scale_clip = scale_clip_from_string(value);
        } else {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                        ": unknown config key '" + key + "'");
        }
    }
    return c;
}

void save_config(const std::filesystem::path& path, const GuidanceConfig& config) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write config file: " + path.string());
    }
    out << "mode = " << to_string(config.mode) << "\n";
    out << "s_g = " << format_number(config.text_scale) << "\n";
    out << "s_S = " << format_number(config.safety_scale) << "\n";
    out << "lambda = " << format_number(config.threshold) << "\n";
    out << "delta = " << config.warmup_steps << "\n";
    out << "s_m = " << format_number(config.momentum_scale) << "\n";
    out << "beta_m = " << format_number(config.momentum_decay) << "\n";
    out << "scale_clip = " << to_string(config.scale_clip) << "\n";
}

GuidanceConfig resolve_config(const std::string& name_or_path) {
    const auto& names = preset_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
        return preset(name_or_path);
    }
    return load_config(name_or_path);
}

}  // namespace sgdiff
