#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sgdiff/guidance.hpp"

namespace sgdiff::tool {

struct SchedulerArgs {
    int train_steps = 1000;
    double beta_start = 8.5e-4;
    double beta_end = 0.012;
    std::string schedule = "linear";  // linear | scaled-linear
    int steps = 50;
    int order = 4;
};

// Raw guidance flags; unset optionals fall back to the preset / config file /
// built-in defaults, in that order of precedence (flags win).
struct ConfigArgs {
    std::string preset;
    std::string config_file;
    std::optional<std::string> mode;
    std::optional<double> s_g;
    std::optional<double> s_S;
    std::optional<double> lambda;
    std::optional<int> delta;
    std::optional<double> s_m;
    std::optional<double> beta_m;
    std::optional<std::string> scale_clip;

    GuidanceConfig resolve() const;
};

struct SampleArgs {
    std::string model;
    SchedulerArgs sched;
    ConfigArgs config;
    int n = 1;
    std::uint64_t seed = 0;
    std::string out;
    std::string prompt_concept = "all";
    std::string safety_concept = "unsafe";
};

struct SweepArgs {
    std::string model;
    SchedulerArgs sched;
    std::string presets = "cfg,neg,weak,medium,strong,max";
    std::optional<double> s_g;
    int n = 10000;
    std::uint64_t seed = 0;
    std::string out;
    std::string prompt_concept = "all";
    std::string safety_concept = "unsafe";
};

struct BenchArgs {
    std::string prompts;
    std::vector<std::string> labels;  // name=path (or bare path)
    int n = 25;
    int resamples = 10000;
    std::uint64_t seed = 0;
    std::string out;
    std::string grid;  // empty: derived from out
};

struct PlotArgs {
    std::string in;
    std::string out;
    std::string title = "unsafe fraction per configuration";
};

int cmd_sample(const SampleArgs& args);
int cmd_sweep(const SweepArgs& args);
int cmd_bench(const BenchArgs& args);
int cmd_plot(const PlotArgs& args);

}  // namespace sgdiff::tool
