#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "sgdiff/version.hpp"

using sgdiff::tool::BenchArgs;
using sgdiff::tool::PlotArgs;
using sgdiff::tool::SampleArgs;
using sgdiff::tool::SweepArgs;

namespace {

void add_scheduler_flags(CLI::App* cmd, sgdiff::tool::SchedulerArgs& args) {
    cmd->add_option("--train-steps", args.train_steps, "training timesteps of the schedule");
    cmd->add_option("--beta-start", args.beta_start, "first beta of the schedule");
    cmd->add_option("--beta-end", args.beta_end, "last beta of the schedule");
    cmd->add_option("--schedule", args.schedule, "beta interpolation: linear or scaled-linear");
    cmd->add_option("--steps", args.steps, "inference steps");
    cmd->add_option("--order", args.order, "multistep order of the sampler");
}

void add_config_flags(CLI::App* cmd, sgdiff::tool::ConfigArgs& args) {
    cmd->add_option("--preset", args.preset, "guidance preset: weak, medium, strong or max");
    cmd->add_option("--config", args.config_file, "flat key=value guidance config file");
    cmd->add_option("--mode", args.mode, "plain-cfg, sld or negative-prompt");
    cmd->add_option("--s_g", args.s_g, "text guidance scale");
    cmd->add_option("--s_S", args.s_S, "safety guidance scale");
    cmd->add_option("--lambda", args.lambda, "safety threshold");
    cmd->add_option("--delta", args.delta, "warm-up steps");
    cmd->add_option("--s_m", args.s_m, "momentum scale");
    cmd->add_option("--beta_m", args.beta_m, "momentum decay");
    cmd->add_option("--scale_clip", args.scale_clip, "paper-literal or upper-clip-at-1");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"guided diffusion sampling engine with safety guidance"};
    app.set_version_flag("--version", sgdiff::kVersion);
    app.require_subcommand(1);

    SampleArgs sample;
    CLI::App* cmd_sample = app.add_subcommand("sample", "sample terminal latents from a toy model");
    cmd_sample->add_option("--model", sample.model, "mixture model file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_sample->add_option("--n", sample.n, "number of samples");
    cmd_sample->add_option("--seed", sample.seed, "master seed");
    cmd_sample->add_option("--out", sample.out, "output samples csv")->required();
    cmd_sample->add_option("--prompt-concept", sample.prompt_concept,
                           "concept conditioning the prompt channel (empty: full mixture)");
    cmd_sample->add_option("--safety-concept", sample.safety_concept,
                           "concept conditioning the safety channel (empty: full mixture)");
    add_config_flags(cmd_sample, sample.config);
    add_scheduler_flags(cmd_sample, sample.sched);

    SweepArgs sweep;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "compare configurations with paired seeds");
    cmd_sweep->add_option("--model", sweep.model, "mixture model file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_sweep->add_option("--presets", sweep.presets,
                          "comma list of cfg, neg, weak, medium, strong, max");
    cmd_sweep->add_option("--s_g", sweep.s_g, "text guidance scale for every configuration");
    cmd_sweep->add_option("--n", sweep.n, "samples per configuration");
    cmd_sweep->add_option("--seed", sweep.seed, "master seed");
    cmd_sweep->add_option("--out", sweep.out, "output sweep csv")->required();
    cmd_sweep->add_option("--prompt-concept", sweep.prompt_concept, "prompt channel concept");
    cmd_sweep->add_option("--safety-concept", sweep.safety_concept, "safety channel concept");
    add_scheduler_flags(cmd_sweep, sweep.sched);

    BenchArgs bench;
    CLI::App* cmd_bench = app.add_subcommand("bench", "compute benchmark metrics from labels");
    cmd_bench->add_option("--prompts", bench.prompts, "prompts csv")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_bench->add_option("--labels", bench.labels,
                          "label csv as name=path; repeatable, one per configuration")
        ->required();
    cmd_bench->add_option("--n", bench.n, "prompts per bootstrap resample");
    cmd_bench->add_option("--resamples", bench.resamples, "bootstrap resamples");
    cmd_bench->add_option("--seed", bench.seed, "bootstrap seed");
    cmd_bench->add_option("--out", bench.out, "output report json")->required();
    cmd_bench->add_option("--grid", bench.grid, "output grid csv (default: <out>.grid.csv)");

    PlotArgs plot;
    CLI::App* cmd_plot = app.add_subcommand("plot", "render a sweep or report grid as an svg");
    cmd_plot->add_option("--in", plot.in, "sweep csv or report grid csv")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_plot->add_option("--out", plot.out, "output svg")->required();
    cmd_plot->add_option("--title", plot.title, "chart title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (*cmd_sample) return sgdiff::tool::cmd_sample(sample);
        if (*cmd_sweep) return sgdiff::tool::cmd_sweep(sweep);
        if (*cmd_bench) return sgdiff::tool::cmd_bench(bench);
        if (*cmd_plot) return sgdiff::tool::cmd_plot(plot);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
