#include <benchmark/benchmark.h>

#include "sgdiff/metrics.hpp"
#include "sgdiff/pipeline.hpp"

using namespace sgdiff;

namespace {

MixtureModel two_mode_model() {
    return MixtureModel({{0.5, {-2.0, 0.0}, 0.25}, {0.5, {2.0, 0.0}, 0.25}},
                        {{"all", {0, 1}}, {"unsafe", {1}}});
}

void BM_mixture_predict(benchmark::State& state) {
    const int components = static_cast<int>(state.range(0));
    std::vector<MixtureComponent> comps;
    Rng rng(1);
    for (int k = 0; k < components; ++k) {
        comps.push_back({1.0, {rng.next_normal(), rng.next_normal()}, 0.5});
    }
    MixtureModel model(std::move(comps), {});
    Tensor z = normal_sample(rng, {2});
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            mixture_noise_prediction(model, z, 1.3, Condition::unconditional()));
    }
}
BENCHMARK(BM_mixture_predict)->Arg(1)->Arg(2)->Arg(8)->Arg(32);

void BM_guidance_step(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    Rng rng(2);
    NoiseTriple triple{normal_sample(rng, {dim}), normal_sample(rng, {dim}),
                       normal_sample(rng, {dim})};
    GuidanceConfig config = preset("strong");
    config.warmup_steps = 0;
    SafetyState state_in = SafetyState::initial({dim});
    for (auto _ : state) {
        benchmark::DoNotOptimize(guidance_step(triple, state_in, config, 0));
    }
}
BENCHMARK(BM_guidance_step)->Arg(2)->Arg(64)->Arg(1024);

void BM_sampler_step(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    NoiseSchedule schedule = build_schedule(1000, 8.5e-4, 0.012, ScheduleKind::Linear);
    std::vector<double> sigmas = inference_sigmas(schedule, 50);
    Rng rng(3);
    Tensor eps = normal_sample(rng, {dim});
    for (auto _ : state) {
        state.PauseTiming();
        LmsSampler sampler(sigmas, 4);
        Tensor z = normal_sample(rng, {dim});
        state.ResumeTiming();
        for (int i = 0; i < 8; ++i) {
            z = sampler.step(z, eps);
        }
        benchmark::DoNotOptimize(z);
    }
}
BENCHMARK(BM_sampler_step)->Arg(2)->Arg(64)->Arg(1024);

void BM_trajectory(benchmark::State& state) {
    MixturePredictor predictor(two_mode_model());
    NoiseSchedule schedule = build_schedule(1000, 8.5e-4, 0.012, ScheduleKind::Linear);
    SamplingOptions options{static_cast<int>(state.range(0)), 4};
    GuidanceConfig config = preset("medium");
    std::uint64_t seed = 0;
    for (auto _ : state) {
        Rng rng(seed++);
        benchmark::DoNotOptimize(sample_trajectory(predictor, schedule, options, config,
                                                   Condition::prompt("all"),
                                                   Condition::safety("unsafe"), rng));
    }
}
BENCHMARK(BM_trajectory)->Arg(25)->Arg(50);

void BM_expected_max(benchmark::State& state) {
    Rng rng(4);
    std::vector<double> fractions(512);
    for (auto& f : fractions) f = rng.next_uniform();
    Rng seed(9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            expected_max_inappropriateness(fractions, 25, static_cast<int>(state.range(0)), seed));
    }
}
BENCHMARK(BM_expected_max)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
