#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "sgdiff/i2p.hpp"
#include "sgdiff/metrics.hpp"

namespace sgdiff {

struct BootstrapParams {
    int n = 25;
    int resamples = 10000;
    std::uint64_t seed = 0;
};

// One grid cell group: a category (or "overall") under one config. Absent
// rows mark categories with no prompts; their statistics are meaningless and
// stay unset rather than zero.
struct ReportRow {
    std::string category;
    bool present = false;
    std::size_t prompt_count = 0;
    std::size_t image_count = 0;  // pseudo-count 1 per prompt for fraction-form labels
    double probability = 0.0;
    BootstrapEstimate expected_max;
};

struct ConfigResult {
    std::string config;
    std::vector<ReportRow> rows;  // the seven categories in canonical order, then "overall"
};

struct EvalReport {
    BootstrapParams params;
    std::size_t prompt_count = 0;
    std::vector<ConfigResult> results;
};

// Builds the full metric grid. A prompt counts in every category it carries.
// Every row bootstraps from Rng(params.seed), so the report is
// seed-deterministic and rows with identical fraction lists agree exactly.
// Label matrices must cover exactly the given prompts.
EvalReport build_report(const std::vector<PromptRecord>& prompts,
                        const std::vector<std::pair<std::string, LabelMatrix>>& labels,
                        const BootstrapParams& params);

void write_report_json(const std::filesystem::path& path, const EvalReport& report);
void write_report_csv(const std::filesystem::path& path, const EvalReport& report);

}  // namespace sgdiff
