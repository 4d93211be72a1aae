#include "sgdiff/i2p.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "sgdiff/csv.hpp"

namespace sgdiff {

namespace {

constexpr const char* kPromptColumns[] = {
    "prompt",          "categories",         "hard",
    "inappropriate_percentage", "nudity_percentage", "q16_percentage",
    "sd_safety_percentage",     "prompt_toxicity",   "lexica_url",
    "sd_seed",         "sd_guidance_scale",  "sd_image_width",
    "sd_image_height"};

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t row, const std::string& msg) {
    throw std::invalid_argument(path.string() + ": row " + std::to_string(row) + ": " + msg);
}

double parse_double_field(const std::filesystem::path& path, std::size_t row,
                          const std::string& column, const std::string& value) {
    try {
        std::size_t pos = 0;
        double v = std::stod(value, &pos);
        if (pos != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(path, row, "column '" + column + "': malformed number '" + value + "'");
    }
}

long long parse_int_field(const std::filesystem::path& path, std::size_t row,
                          const std::string& column, const std::string& value) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(path, row, "column '" + column + "': malformed integer '" + value + "'");
    }
}

bool parse_bool_field(const std::filesystem::path& path, std::size_t row,
                      const std::string& column, std::string value) {
    std::transform(value.begin(), value.end(), value.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    fail(path, row, "column '" + column + "': malformed boolean '" + value + "'");
}

std::string canonical_category(const std::string& raw) {
    std::string c;
    for (char ch : raw) {
        c += (ch == ' ') ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    return c;
}

bool known_category(const std::string& c) {
    return std::find(kCategories.begin(), kCategories.end(), c) != kCategories.end();
}

std::vector<std::string> split_categories(const std::string& field) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : field) {
        if (ch == ',') {
            out.push_back(current);
            current.clear();
        } else {
            current += ch;
        }
    }
    out.push_back(current);
    for (auto& c : out) {
        auto b = c.find_first_not_of(' ');
        auto e = c.find_last_not_of(' ');
        c = (b == std::string::npos) ? "" : c.substr(b, e - b + 1);
    }
    return out;
}

void check_range(const std::filesystem::path& path, std::size_t row, const std::string& column,
                 double v, double lo, double hi) {
    if (!(v >= lo && v <= hi)) {
        fail(path, row, "column '" + column + "': value " + csv::format_double(v) +
                        " outside [" + csv::format_double(lo) + ", " + csv::format_double(hi) + "]");
    }
}

}  // namespace

std::vector<PromptRecord> load_prompts(const std::filesystem::path& path) {
    auto rows = csv::read_file(path);
    if (rows.empty()) {
        throw std::invalid_argument(path.string() + ": missing header row");
    }

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < rows[0].size(); ++i) {
        index[rows[0][i]] = i;
    }
    for (const char* column : kPromptColumns) {
        if (!index.count(column)) {
            throw std::invalid_argument(path.string() + ": missing required column '" +
                                        std::string(column) + "'");
        }
    }
    auto field = [&](std::size_t r, const char* column) -> const std::string& {
        std::size_t i = index.at(column);
        if (i >= rows[r].size()) {
            fail(path, r + 1, "missing field for column '" + std::string(column) + "'");
        }
        return rows[r][i];
    };

    std::vector<PromptRecord> records;
    records.reserve(rows.size() - 1);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::size_t row_no = r + 1;  // header is row 1
        PromptRecord rec;
        rec.prompt = field(r, "prompt");

        for (const std::string& raw : split_categories(field(r, "categories"))) {
            std::string c = canonical_category(raw);
            if (c.empty()) continue;
            if (!known_category(c)) {
                fail(path, row_no, "unknown category '" + raw + "'");
            }
            rec.categories.push_back(c);
        }
        if (rec.categories.empty()) {
            fail(path, row_no, "categories must be nonempty");
        }

        rec.hard = parse_bool_field(path, row_no, "hard", field(r, "hard"));
        rec.inappropriate_percentage =
            parse_double_field(path, row_no, "inappropriate_percentage",
                               field(r, "inappropriate_percentage"));
        rec.nudity_percentage =
            parse_double_field(path, row_no, "nudity_percentage", field(r, "nudity_percentage"));
        rec.q16_percentage =
            parse_double_field(path, row_no, "q16_percentage", field(r, "q16_percentage"));
        rec.sd_safety_percentage = parse_double_field(path, row_no, "sd_safety_percentage",
                                                      field(r, "sd_safety_percentage"));
        rec.prompt_toxicity =
            parse_double_field(path, row_no, "prompt_toxicity", field(r, "prompt_toxicity"));
        check_range(path, row_no, "inappropriate_percentage", rec.inappropriate_percentage, 0, 100);
        check_range(path, row_no, "nudity_percentage", rec.nudity_percentage, 0, 100);
        check_range(path, row_no, "q16_percentage", rec.q16_percentage, 0, 100);
        check_range(path, row_no, "sd_safety_percentage", rec.sd_safety_percentage, 0, 100);
        check_range(path, row_no, "prompt_toxicity", rec.prompt_toxicity, 0, 1);

        rec.lexica_url = field(r, "lexica_url");
        rec.seed = parse_int_field(path, row_no, "sd_seed", field(r, "sd_seed"));
        rec.guidance_scale =
            parse_double_field(path, row_no, "sd_guidance_scale", field(r, "sd_guidance_scale"));
        rec.image_width = static_cast<int>(
            parse_int_field(path, row_no, "sd_image_width", field(r, "sd_image_width")));
        rec.image_height = static_cast<int>(
            parse_int_field(path, row_no, "sd_image_height", field(r, "sd_image_height")));
        records.push_back(std::move(rec));
    }
    return records;
}

void save_prompts(const std::filesystem::path& path, const std::vector<PromptRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write prompts file: " + path.string());
    }
    std::vector<std::string> header(std::begin(kPromptColumns), std::end(kPromptColumns));
    csv::write_row(out, header);
    for (const auto& rec : records) {
        std::string categories;
        for (std::size_t i = 0; i < rec.categories.size(); ++i) {
            if (i > 0) categories += ',';
            categories += rec.categories[i];
        }
        std::vector<std::string> row = {
            rec.prompt,
            categories,
            rec.hard ? "true" : "false",
            csv::format_double(rec.inappropriate_percentage),
            csv::format_double(rec.nudity_percentage),
            csv::format_double(rec.q16_percentage),
            csv::format_double(rec.sd_safety_percentage),
            csv::format_double(rec.prompt_toxicity),
            rec.lexica_url,
            std::to_string(rec.seed),
            csv::format_double(rec.guidance_scale),
            std::to_string(rec.image_width),
            std::to_string(rec.image_height)};
        csv::write_row(out, row);
    }
}

LabelMatrix::LabelMatrix(std::vector<PromptLabels> per_prompt)
    : per_prompt_(std::move(per_prompt)) {
    for (std::size_t p = 0; p < per_prompt_.size(); ++p) {
        const auto& entry = per_prompt_[p];
        if (!(entry.fraction >= 0.0 && entry.fraction <= 1.0)) {
            throw std::invalid_argument("label matrix: prompt " + std::to_string(p) +
                                        ": fraction outside [0, 1]");
        }
        if (!entry.labels.empty()) {
            double sum = 0.0;
            for (int label : entry.labels) {
                if (label != 0 && label != 1) {
                    throw std::invalid_argument("label matrix: prompt " + std::to_string(p) +
                                                ": labels must be 0 or 1");
                }
                sum += label;
            }
            double mean = sum / static_cast<double>(entry.labels.size());
            if (std::fabs(mean - entry.fraction) > 1e-12) {
                throw std::invalid_argument("label matrix: prompt " + std::to_string(p) +
                                            ": fraction does not equal the label mean");
            }
        }
    }
}

const PromptLabels& LabelMatrix::at(std::size_t prompt_id) const {
    if (prompt_id >= per_prompt_.size()) {
        throw std::invalid_argument("label matrix: prompt id " + std::to_string(prompt_id) +
                                    " out of range");
    }
    return per_prompt_[prompt_id];
}

LabelMatrix load_labels(const std::filesystem::path& path, std::size_t prompt_count) {
    auto rows = csv::read_file(path);
    if (rows.empty()) {
        throw std::invalid_argument(path.string() + ": missing header row");
    }
    const auto& header = rows[0];

    const bool per_image = header.size() >= 3 && header[0] == "prompt_id" &&
                           header[1] == "image_index" && header[2] == "label";
    const bool per_fraction =
        !per_image && header.size() >= 2 && header[0] == "prompt_id" && header[1] == "fraction";
    if (!per_image && !per_fraction) {
        throw std::invalid_argument(path.string() +
                                    ": header must be prompt_id,image_index,label or "
                                    "prompt_id,fraction");
    }

    std::vector<std::map<long long, int>> images(prompt_count);
    std::vector<double> fractions(prompt_count, -1.0);

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::size_t row_no = r + 1;
        const auto& row = rows[r];
        if (row.size() < (per_image ? 3u : 2u)) {
            fail(path, row_no, "too few fields");
        }
        long long id = parse_int_field(path, row_no, "prompt_id", row[0]);
        if (id < 0 || static_cast<std::size_t>(id) >= prompt_count) {
            fail(path, row_no, "prompt_id " + std::to_string(id) + " out of range [0, " +
                               std::to_string(prompt_count) + ")");
        }
        if (per_image) {
            long long image = parse_int_field(path, row_no, "image_index", row[1]);
            long long label = parse_int_field(path, row_no, "label", row[2]);
            if (label != 0 && label != 1) {
                fail(path, row_no, "label must be 0 or 1");
            }
            auto [it, inserted] = images[id].emplace(image, static_cast<int>(label));
            if (!inserted) {
                fail(path, row_no, "duplicate image_index " + std::to_string(image) +
                                   " for prompt " + std::to_string(id));
            }
        } else {
            double fraction = parse_double_field(path, row_no, "fraction", row[1]);
            if (!(fraction >= 0.0 && fraction <= 1.0)) {
                fail(path, row_no, "fraction outside [0, 1]");
            }
            if (fractions[id] >= 0.0) {
                fail(path, row_no, "duplicate fraction for prompt " + std::to_string(id));
            }
            fractions[id] = fraction;
        }
    }

    std::vector<PromptLabels> per_prompt(prompt_count);
    for (std::size_t p = 0; p < prompt_count; ++p) {
        if (per_image) {
            if (images[p].empty()) {
                throw std::invalid_argument(path.string() + ": no labels for prompt " +
                                            std::to_string(p));
            }
            double sum = 0.0;
            for (const auto& [image, label] : images[p]) {
                per_prompt[p].labels.push_back(label);
                sum += label;
            }
            per_prompt[p].fraction = sum / static_cast<double>(per_prompt[p].labels.size());
        } else {
            if (fractions[p] < 0.0) {
                throw std::invalid_argument(path.string() + ": no fraction for prompt " +
                                            std::to_string(p));
            }
            per_prompt[p].fraction = fractions[p];
        }
    }
    return LabelMatrix(std::move(per_prompt));
}

}  // namespace sgdiff
