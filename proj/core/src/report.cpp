#include "sgdiff/report.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "sgdiff/csv.hpp"

namespace sgdiff {

namespace {

ReportRow make_row(const std::string& category, const std::vector<std::size_t>& subset,
                   const LabelMatrix& labels, const BootstrapParams& params, const Rng& rng) {
    ReportRow row;
    row.category = category;
    if (subset.empty()) {
        return row;  // absent
    }
    row.present = true;
    row.prompt_count = subset.size();
    std::vector<double> fractions;
    fractions.reserve(subset.size());
    for (std::size_t id : subset) {
        const PromptLabels& entry = labels.at(id);
        row.image_count += entry.weight();
        fractions.push_back(entry.fraction);
    }
    row.probability = inappropriate_probability(labels, subset);
    row.expected_max = expected_max_inappropriateness(fractions, params.n, params.resamples, rng);
    return row;
}

}  // namespace

EvalReport build_report(const std::vector<PromptRecord>& prompts,
                        const std::vector<std::pair<std::string, LabelMatrix>>& labels,
                        const BootstrapParams& params) {
    if (labels.empty()) {
        throw std::invalid_argument("build_report: no label sets given");
    }
    for (const auto& [name, matrix] : labels) {
        if (matrix.prompt_count() != prompts.size()) {
            throw std::invalid_argument("build_report: label set '" + name + "' covers " +
                                        std::to_string(matrix.prompt_count()) +
                                        " prompts, dataset has " + std::to_string(prompts.size()));
        }
    }

    // category -> prompt ids; a prompt appears in every category it carries
    std::vector<std::vector<std::size_t>> category_subsets(kCategories.size());
    std::vector<std::size_t> all_ids(prompts.size());
    for (std::size_t p = 0; p < prompts.size(); ++p) {
        all_ids[p] = p;
        for (const std::string& c : prompts[p].categories) {
            auto it = std::find(kCategories.begin(), kCategories.end(), c);
            if (it != kCategories.end()) {
                category_subsets[it - kCategories.begin()].push_back(p);
            }
        }
    }

    EvalReport report;
    report.params = params;
    report.prompt_count = prompts.size();
    // every row bootstraps from the same master stream (expected_max splits it
    // per resample), so rows with identical fraction lists agree exactly
    Rng master(params.seed);
    for (const auto& [name, matrix] : labels) {
        ConfigResult result;
        result.config = name;
        for (std::size_t k = 0; k < kCategories.size(); ++k) {
            result.rows.push_back(
                make_row(kCategories[k], category_subsets[k], matrix, params, master));
        }
        result.rows.push_back(make_row("overall", all_ids, matrix, params, master));
        report.results.push_back(std::move(result));
    }
    return report;
}

void write_report_json(const std::filesystem::path& path, const EvalReport& report) {
    nlohmann::json j;
    j["schema"] = "sgdiff-report-v1";
    j["params"] = {{"n", report.params.n},
                   {"resamples", report.params.resamples},
                   {"seed", report.params.seed}};
    j["prompt_count"] = report.prompt_count;
    j["results"] = nlohmann::json::array();
    for (const auto& result : report.results) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& row : result.rows) {
            nlohmann::json r = {{"category", row.category}, {"present", row.present}};
            if (row.present) {
                r["prompt_count"] = row.prompt_count;
                r["image_count"] = row.image_count;
                r["inappropriate_probability"] = row.probability;
                r["expected_max_mean"] = row.expected_max.mean;
                r["expected_max_std"] = row.expected_max.stddev;
            }
            rows.push_back(std::move(r));
        }
        j["results"].push_back({{"config", result.config}, {"rows", std::move(rows)}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write report file: " + path.string());
    }
    out << j.dump(2) << "\n";
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write grid file: " + path.string());
    }
    std::vector<std::string> header = {"config",          "category",
                                       "present",         "prompt_count",
                                       "image_count",     "inappropriate_probability",
                                       "expected_max_mean", "expected_max_std"};
    csv::write_row(out, header);
    for (const auto& result : report.results) {
        for (const auto& row : result.rows) {
            std::vector<std::string> fields;
            fields.push_back(result.config);
            fields.push_back(row.category);
            fields.push_back(row.present ? "true" : "false");
            if (row.present) {
                fields.push_back(std::to_string(row.prompt_count));
                fields.push_back(std::to_string(row.image_count));
                fields.push_back(csv::format_double(row.probability));
                fields.push_back(csv::format_double(row.expected_max.mean));
                fields.push_back(csv::format_double(row.expected_max.stddev));
            } else {
                fields.insert(fields.end(), 5, "");
            }
            csv::write_row(out, fields);
        }
    }
}

}  // namespace sgdiff
