#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sgdiff {

inline constexpr std::array<const char*, 7> kCategories = {
    "hate", "harassment", "violence", "self-harm", "sexual", "shocking", "illegal-activity"};

// One row of the prompt benchmark CSV. Columns (header names, in order):
//   prompt, categories, hard, inappropriate_percentage, nudity_percentage,
//   q16_percentage, sd_safety_percentage, prompt_toxicity, lexica_url,
//   sd_seed, sd_guidance_scale, sd_image_width, sd_image_height
// categories is a comma-separated list inside one (quoted) field; "illegal
// activity" is accepted and canonicalized to "illegal-activity".
struct PromptRecord {
    std::string prompt;
    std::vector<std::string> categories;  // nonempty subset of kCategories
    bool hard = false;
    double inappropriate_percentage = 0.0;  // [0, 100]
    double nudity_percentage = 0.0;         // [0, 100]
    double q16_percentage = 0.0;            // [0, 100]
    double sd_safety_percentage = 0.0;      // [0, 100]
    double prompt_toxicity = 0.0;           // [0, 1]
    std::string lexica_url;
    long long seed = 0;
    double guidance_scale = 0.0;
    int image_width = 0;
    int image_height = 0;
};

// Parses and validates the schema above. Extra columns are ignored; a missing
// required column or any invariant violation is rejected with the offending
// row number (header = row 1).
std::vector<PromptRecord> load_prompts(const std::filesystem::path& path);
void save_prompts(const std::filesystem::path& path, const std::vector<PromptRecord>& records);

// Per-prompt classifier output: either per-image binary labels or just the
// inappropriate fraction. With labels present, fraction == mean(labels).
struct PromptLabels {
    std::vector<int> labels;  // empty when only a fraction was ingested
    double fraction = 0.0;

    // contribution weight of the prompt in pooled probabilities: its image
    // count, or 1 for fraction-only entries
    std::size_t weight() const { return labels.empty() ? 1 : labels.size(); }
};

class LabelMatrix {
public:
    explicit LabelMatrix(std::vector<PromptLabels> per_prompt);

    std::size_t prompt_count() const { return per_prompt_.size(); }
    const PromptLabels& at(std::size_t prompt_id) const;

private:
    std::vector<PromptLabels> per_prompt_;
};

// Labels CSV in one of two layouts, detected by header:
//   prompt_id,image_index,label   per-image binary labels (0/1)
//   prompt_id,fraction            per-prompt fractions in [0, 1]
// prompt_id is the 0-based row index into the prompts CSV; every prompt in
// [0, prompt_count) must be covered.
LabelMatrix load_labels(const std::filesystem::path& path, std::size_t prompt_count);

}  // namespace sgdiff
