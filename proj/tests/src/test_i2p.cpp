#include <doctest.h>

#include <fstream>
#include <stdexcept>

#include "sgdiff/i2p.hpp"
#include "test_util.hpp"

using namespace sgdiff;
using sgdiff::test::TempDir;

namespace {

PromptRecord make_record(std::string prompt, std::vector<std::string> categories) {
    PromptRecord r;
    r.prompt = std::move(prompt);
    r.categories = std::move(categories);
    r.hard = true;
    r.inappropriate_percentage = 70.0;
    r.nudity_percentage = 10.0;
    r.q16_percentage = 65.5;
    r.sd_safety_percentage = 30.0;
    r.prompt_toxicity = 0.12;
    r.lexica_url = "https://lexica.art/prompt/x";
    r.seed = 1234567;
    r.guidance_scale = 7.5;
    r.image_width = 512;
    r.image_height = 512;
    return r;
}

const char* kHeader =
    "prompt,categories,hard,inappropriate_percentage,nudity_percentage,q16_percentage,"
    "sd_safety_percentage,prompt_toxicity,lexica_url,sd_seed,sd_guidance_scale,"
    "sd_image_width,sd_image_height";

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    out << body;
}

}  // namespace

TEST_CASE("prompt records round-trip through the csv schema") {
    TempDir dir;
    std::vector<PromptRecord> records = {
        make_record("a quiet landscape, oil on canvas", {"violence"}),
        make_record("prompt with \"quotes\" and, commas", {"sexual", "shocking"}),
        make_record("plain prompt", {"hate", "self-harm", "illegal-activity"}),
    };
    records[1].hard = false;
    records[1].prompt_toxicity = 0.0;
    records[2].inappropriate_percentage = 0.5;

    auto file = dir.path / "prompts.csv";
    save_prompts(file, records);
    auto loaded = load_prompts(file);
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(loaded[i].prompt == records[i].prompt);
        CHECK(loaded[i].categories == records[i].categories);
        CHECK(loaded[i].hard == records[i].hard);
        CHECK(loaded[i].inappropriate_percentage == records[i].inappropriate_percentage);
        CHECK(loaded[i].nudity_percentage == records[i].nudity_percentage);
        CHECK(loaded[i].q16_percentage == records[i].q16_percentage);
        CHECK(loaded[i].sd_safety_percentage == records[i].sd_safety_percentage);
        CHECK(loaded[i].prompt_toxicity == records[i].prompt_toxicity);
        CHECK(loaded[i].lexica_url == records[i].lexica_url);
        CHECK(loaded[i].seed == records[i].seed);
        CHECK(loaded[i].guidance_scale == records[i].guidance_scale);
        CHECK(loaded[i].image_width == records[i].image_width);
        CHECK(loaded[i].image_height == records[i].image_height);
    }
}

TEST_CASE("categories split on the comma inside the quoted field") {
    TempDir dir;
    auto file = dir.path / "p.csv";
    write_file(file, std::string(kHeader) +
                         "\np,\"sexual,shocking\",false,1,1,1,1,0.5,u,1,7.5,512,512\n");
    auto records = load_prompts(file);
    REQUIRE(records.size() == 1);
    CHECK(records[0].categories == std::vector<std::string>{"sexual", "shocking"});
}

TEST_CASE("the datasheet spelling 'illegal activity' is canonicalized") {
    TempDir dir;
    auto file = dir.path / "p.csv";
    write_file(file, std::string(kHeader) +
                         "\np,illegal activity,false,1,1,1,1,0.5,u,1,7.5,512,512\n");
    auto records = load_prompts(file);
    CHECK(records[0].categories == std::vector<std::string>{"illegal-activity"});
}

TEST_CASE("invariant violations are rejected with row context") {
    TempDir dir;
    auto file = dir.path / "p.csv";

    SUBCASE("percentage out of range") {
        write_file(file, std::string(kHeader) + "\np,hate,false,150,1,1,1,0.5,u,1,7.5,512,512\n");
        CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("row 2"),
                             std::invalid_argument);
        CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("outside [0, 100]"),
                             std::invalid_argument);
    }
    SUBCASE("toxicity out of range") {
        write_file(file, std::string(kHeader) + "\np,hate,false,1,1,1,1,1.5,u,1,7.5,512,512\n");
        CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("prompt_toxicity"),
                             std::invalid_argument);
    }
    SUBCASE("empty categories") {
        write_file(file, std::string(kHeader) + "\np,,false,1,1,1,1,0.5,u,1,7.5,512,512\n");
        CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("categories"),
                             std::invalid_argument);
    }
    SUBCASE("unknown category") {
        write_file(file, std::string(kHeader) + "\np,sports,false,1,1,1,1,0.5,u,1,7.5,512,512\n");
        CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("unknown category"),
                             std::invalid_argument);
    }
    SUBCASE("malformed numeric names row and column") {
        write_file(file, std::string(kHeader) + "\np,hate,false,1,1,abc,1,0.5,u,1,7.5,512,512\n");
        CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("q16_percentage"),
                             std::invalid_argument);
        CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("row 2"),
                             std::invalid_argument);
    }
    SUBCASE("malformed boolean") {
        write_file(file, std::string(kHeader) + "\np,hate,maybe,1,1,1,1,0.5,u,1,7.5,512,512\n");
        CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("hard"), std::invalid_argument);
    }
    SUBCASE("violations report the right row in multi-row files") {
        write_file(file, std::string(kHeader) +
                             "\nok,hate,false,1,1,1,1,0.5,u,1,7.5,512,512"
                             "\nbad,hate,false,1,101,1,1,0.5,u,1,7.5,512,512\n");
        CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("row 3"),
                             std::invalid_argument);
    }
}

TEST_CASE("missing required columns are named") {
    TempDir dir;
    auto file = dir.path / "p.csv";
    write_file(file,
               "prompt,categories,hard,inappropriate_percentage,nudity_percentage,"
               "q16_percentage,sd_safety_percentage,prompt_toxicity,lexica_url,sd_seed,"
               "sd_guidance_scale,sd_image_width\np,hate,false,1,1,1,1,0.5,u,1,7.5,512\n");
    CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("sd_image_height"),
                         std::invalid_argument);
    write_file(file, "");
    CHECK_THROWS_WITH_AS(load_prompts(file), doctest::Contains("header"), std::invalid_argument);
}

TEST_CASE("per-image labels aggregate to fractions") {
    TempDir dir;
    auto file = dir.path / "labels.csv";
    write_file(file,
               "prompt_id,image_index,label\n"
               "0,0,1\n0,1,0\n0,2,1\n0,3,1\n"
               "1,0,0\n1,1,0\n");
    LabelMatrix labels = load_labels(file, 2);
    CHECK(labels.at(0).labels == std::vector<int>{1, 0, 1, 1});
    CHECK(labels.at(0).fraction == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(labels.at(0).weight() == 4);
    CHECK(labels.at(1).fraction == 0.0);
}

TEST_CASE("fraction-form labels load with weight one") {
    TempDir dir;
    auto file = dir.path / "labels.csv";
    write_file(file, "prompt_id,fraction\n0,0.4\n1,1.0\n");
    LabelMatrix labels = load_labels(file, 2);
    CHECK(labels.at(0).fraction == 0.4);
    CHECK(labels.at(0).labels.empty());
    CHECK(labels.at(0).weight() == 1);
}

TEST_CASE("label files are validated") {
    TempDir dir;
    auto file = dir.path / "labels.csv";

    SUBCASE("unknown header") {
        write_file(file, "id,value\n0,1\n");
        CHECK_THROWS_AS(load_labels(file, 1), std::invalid_argument);
    }
    SUBCASE("label out of {0,1}") {
        write_file(file, "prompt_id,image_index,label\n0,0,2\n");
        CHECK_THROWS_AS(load_labels(file, 1), std::invalid_argument);
    }
    SUBCASE("duplicate image index") {
        write_file(file, "prompt_id,image_index,label\n0,0,1\n0,0,0\n");
        CHECK_THROWS_WITH_AS(load_labels(file, 1), doctest::Contains("duplicate"),
                             std::invalid_argument);
    }
    SUBCASE("prompt id out of range") {
        write_file(file, "prompt_id,image_index,label\n5,0,1\n");
        CHECK_THROWS_WITH_AS(load_labels(file, 1), doctest::Contains("out of range"),
                             std::invalid_argument);
    }
    SUBCASE("uncovered prompt") {
        write_file(file, "prompt_id,image_index,label\n0,0,1\n");
        CHECK_THROWS_WITH_AS(load_labels(file, 2), doctest::Contains("no labels for prompt 1"),
                             std::invalid_argument);
    }
    SUBCASE("fraction out of range") {
        write_file(file, "prompt_id,fraction\n0,1.5\n");
        CHECK_THROWS_AS(load_labels(file, 1), std::invalid_argument);
    }
}

TEST_CASE("label matrix construction enforces the fraction invariant") {
    CHECK_THROWS_AS(LabelMatrix({{{1, 1, 0}, 0.9}}), std::invalid_argument);
    CHECK_THROWS_AS(LabelMatrix({{{2}, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(LabelMatrix({{{}, 1.5}}), std::invalid_argument);
    LabelMatrix ok({{{1, 1, 0}, 2.0 / 3.0}});
    CHECK(ok.at(0).weight() == 3);
    CHECK_THROWS_AS(ok.at(1), std::invalid_argument);
}
