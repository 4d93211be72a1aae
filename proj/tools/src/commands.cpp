#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include "sgdiff/config_io.hpp"
#include "sgdiff/csv.hpp"
#include "sgdiff/i2p.hpp"
#include "sgdiff/metrics.hpp"
#include "sgdiff/mixture.hpp"
#include "sgdiff/pipeline.hpp"
#include "sgdiff/report.hpp"
#include "sgdiff/scheduler.hpp"

#include "manifest.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;

namespace sgdiff::tool {

namespace {

// Relative outputs may be redirected with SGDIFF_OUT_DIR.
fs::path resolve_out(const std::string& out) {
    fs::path p(out);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("SGDIFF_OUT_DIR")) {
            p = fs::path(dir) / p;
        }
    }
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    return p;
}

ScheduleKind schedule_kind(const std::string& name) {
    if (name == "linear") return ScheduleKind::Linear;
    if (name == "scaled-linear") return ScheduleKind::ScaledLinear;
    throw std::invalid_argument("unknown schedule '" + name +
                                "' (valid: linear, scaled-linear)");
}

Condition make_condition(ConditionTag tag, const std::string& concept_id) {
    Condition c;
    c.tag = tag;
    if (!concept_id.empty()) {
        c.concept_id = concept_id;
    }
    return c;
}

nlohmann::json config_json(const GuidanceConfig& c) {
    return {{"mode", to_string(c.mode)},       {"s_g", c.text_scale},
            {"s_S", c.safety_scale},           {"lambda", c.threshold},
            {"delta", c.warmup_steps},         {"s_m", c.momentum_scale},
            {"beta_m", c.momentum_decay},      {"scale_clip", to_string(c.scale_clip)}};
}

nlohmann::json scheduler_json(const SchedulerArgs& s) {
    return {{"train_steps", s.train_steps}, {"beta_start", s.beta_start},
            {"beta_end", s.beta_end},       {"schedule", s.schedule},
            {"steps", s.steps},             {"order", s.order}};
}

void write_samples_csv(const fs::path& path, const std::vector<Tensor>& samples) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write samples: " + path.string());
    }
    std::vector<std::string> header;
    for (std::size_t i = 0; i < samples.front().size(); ++i) {
        header.push_back("x" + std::to_string(i));
    }
    csv::write_row(out, header);
    std::vector<std::string> row(header.size());
    for (const Tensor& s : samples) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = csv::format_double(s[i]);
        }
        csv::write_row(out, row);
    }
}

}  // namespace

GuidanceConfig ConfigArgs::resolve() const {
    if (!preset.empty() && !config_file.empty()) {
        throw std::invalid_argument("give either --preset or --config, not both");
    }
    GuidanceConfig c;
    if (!preset.empty()) {
        c = sgdiff::preset(preset);
    } else if (!config_file.empty()) {
        c = load_config(config_file);
    }
    if (mode) c.mode = mode_from_string(*mode);
    if (s_g) c.text_scale = *s_g;
    if (s_S) c.safety_scale = *s_S;
    if (lambda) c.threshold = *lambda;
    if (delta) c.warmup_steps = *delta;
    if (s_m) c.momentum_scale = *s_m;
    if (beta_m) c.momentum_decay = *beta_m;
    if (scale_clip) c.scale_clip = scale_clip_from_string(*scale_clip);
    return c;
}

int cmd_sample(const SampleArgs& args) {
    if (args.n < 1) {
        throw std::invalid_argument("--n must be >= 1");
    }
    MixturePredictor predictor(MixtureModel::load(args.model));
    GuidanceConfig config = args.config.resolve();
    NoiseSchedule schedule = build_schedule(args.sched.train_steps, args.sched.beta_start,
                                            args.sched.beta_end, schedule_kind(args.sched.schedule));
    SamplingOptions options{args.sched.steps, args.sched.order};
    config.validate(options.num_inference_steps);

    Condition prompt = make_condition(ConditionTag::Prompt, args.prompt_concept);
    Condition safety = make_condition(ConditionTag::Safety, args.safety_concept);

    std::vector<Tensor> samples = sample_many(predictor, schedule, options, config, prompt,
                                              safety, args.seed, args.n);

    fs::path out = resolve_out(args.out);
    write_samples_csv(out, samples);

    for (const auto& [concept_id, indices] : predictor.model().concepts()) {
        double fraction = mode_fraction(samples, predictor.model(), concept_id);
        std::cout << "mode_fraction " << concept_id << " " << csv::format_double(fraction) << "\n";
    }

    write_manifest(out, "sample",
                   {{"model", args.model},
                    {"out", out.string()},
                    {"n", args.n},
                    {"seed", args.seed},
                    {"prompt_concept", args.prompt_concept},
                    {"safety_concept", args.safety_concept},
                    {"config", config_json(config)},
                    {"sampler", scheduler_json(args.sched)}});
    return 0;
}

namespace {

GuidanceConfig sweep_entry(const std::string& token) {
    if (token == "cfg" || token == "plain-cfg") {
        GuidanceConfig c;
        c.mode = GuidanceMode::PlainCfg;
        return c;
    }
    if (token == "neg" || token == "negative-prompt") {
        GuidanceConfig c;
        c.mode = GuidanceMode::NegativePrompt;
        return c;
    }
    try {
        return preset(token);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("unknown sweep entry '" + token +
                                    "' (valid: cfg, neg, weak, medium, strong, max)");
    }
}

}  // namespace

int cmd_sweep(const SweepArgs& args) {
    if (args.n < 1) {
        throw std::invalid_argument("--n must be >= 1");
    }
    std::vector<std::string> tokens;
    std::string current;
    for (char c : args.presets) {
        if (c == ',') {
            if (!current.empty()) tokens.push_back(current);
            current.clear();
        } else if (c != ' ') {
            current += c;
        }
    }
    if (!current.empty()) tokens.push_back(current);
    if (tokens.empty()) {
        throw std::invalid_argument("--presets must name at least one configuration");
    }

    MixturePredictor predictor(MixtureModel::load(args.model));
    NoiseSchedule schedule = build_schedule(args.sched.train_steps, args.sched.beta_start,
                                            args.sched.beta_end, schedule_kind(args.sched.schedule));
    SamplingOptions options{args.sched.steps, args.sched.order};
    Condition prompt = make_condition(ConditionTag::Prompt, args.prompt_concept);
    Condition safety = make_condition(ConditionTag::Safety, args.safety_concept);

    fs::path out = resolve_out(args.out);
    std::ofstream file(out, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write sweep: " + out.string());
    }
    std::vector<std::string> header = {"config", "fraction"};
    csv::write_row(file, header);

    for (const std::string& token : tokens) {
        GuidanceConfig config = sweep_entry(token);
        if (args.s_g) config.text_scale = *args.s_g;
        config.validate(options.num_inference_steps);
        // paired seeds: every configuration reuses the same per-trajectory streams
        std::vector<Tensor> samples = sample_many(predictor, schedule, options, config, prompt,
                                                  safety, args.seed, args.n);
        double fraction = mode_fraction(samples, predictor.model(), args.safety_concept);
        std::vector<std::string> row = {token, csv::format_double(fraction)};
        csv::write_row(file, row);
        std::cout << token << " " << csv::format_double(fraction) << "\n";
    }
    file.close();

    write_manifest(out, "sweep",
                   {{"model", args.model},
                    {"out", out.string()},
                    {"n", args.n},
                    {"seed", args.seed},
                    {"presets", args.presets},
                    {"s_g", args.s_g ? nlohmann::json(*args.s_g) : nlohmann::json()},
                    {"prompt_concept", args.prompt_concept},
                    {"safety_concept", args.safety_concept},
                    {"sampler", scheduler_json(args.sched)}});
    return 0;
}

int cmd_bench(const BenchArgs& args) {
    if (args.labels.empty()) {
        throw std::invalid_argument("--labels is required (name=path)");
    }
    std::vector<PromptRecord> prompts = load_prompts(args.prompts);

    std::vector<std::pair<std::string, LabelMatrix>> labels;
    nlohmann::json label_files = nlohmann::json::object();
    for (const std::string& spec : args.labels) {
        std::string name, path;
        auto eq = spec.find('=');
        if (eq == std::string::npos) {
            path = spec;
            name = fs::path(spec).stem().string();
        } else {
            name = spec.substr(0, eq);
            path = spec.substr(eq + 1);
        }
        if (name.empty() || path.empty()) {
            throw std::invalid_argument("--labels entries must be name=path, got '" + spec + "'");
        }
        if (!fs::exists(path)) {
            throw std::invalid_argument("labels file does not exist: " + path);
        }
        labels.emplace_back(name, load_labels(path, prompts.size()));
        label_files[name] = path;
    }

    BootstrapParams params{args.n, args.resamples, args.seed};
    EvalReport report = build_report(prompts, labels, params);

    fs::path out = resolve_out(args.out);
    write_report_json(out, report);

    fs::path grid = args.grid.empty() ? fs::path(out).replace_extension(".grid.csv")
                                      : resolve_out(args.grid);
    write_report_csv(grid, report);

    write_manifest(out, "bench",
                   {{"prompts", args.prompts},
                    {"labels", label_files},
                    {"out", out.string()},
                    {"grid", grid.string()},
                    {"n", args.n},
                    {"resamples", args.resamples},
                    {"seed", args.seed}});
    return 0;
}

int cmd_plot(const PlotArgs& args) {
    auto rows = csv::read_file(args.in);
    if (rows.empty()) {
        throw std::invalid_argument(args.in + ": empty csv");
    }
    const auto& header = rows[0];
    std::vector<Bar> bars;

    if (header.size() >= 2 && header[0] == "config" && header[1] == "fraction") {
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].size() < 2) {
                throw std::invalid_argument(args.in + ": row " + std::to_string(r + 1) +
                                            ": too few fields");
            }
            bars.push_back({rows[r][0], std::stod(rows[r][1])});
        }
    } else if (header.size() >= 6 && header[0] == "config" && header[1] == "category") {
        // report grid: plot the overall inappropriate probability per config
        for (std::size_t r = 1; r < rows.size(); ++r) {
            const auto& row = rows[r];
            if (row.size() >= 6 && row[1] == "overall" && row[2] == "true") {
                bars.push_back({row[0], std::stod(row[5])});
            }
        }
    } else {
        throw std::invalid_argument(args.in + ": expected a sweep csv (config,fraction) or a "
                                              "report grid csv");
    }

    if (bars.empty()) {
        throw std::invalid_argument(args.in + ": no plottable rows");
    }

    fs::path out = resolve_out(args.out);
    write_bar_chart(out, bars, args.title);
    write_manifest(out, "plot", {{"in", args.in}, {"out", out.string()}, {"title", args.title}});
    return 0;
}

}  // namespace sgdiff::tool
