#include "sgdiff/pipeline.hpp"

#include <stdexcept>

namespace sgdiff {

Tensor sample_trajectory(const NoisePredictor& predictor, const NoiseSchedule& schedule,
                         const SamplingOptions& options, const GuidanceConfig& config,
                         const Condition& prompt, const Condition& safety, Rng& rng) {
    config.validate(options.num_inference_steps);
    if (prompt.tag == ConditionTag::Unconditional && prompt.concept_id.has_value()) {
        throw std::invalid_argument("sample_trajectory: unconditional prompt carries a concept");
    }

    LmsSampler sampler(inference_sigmas(schedule, options.num_inference_steps), options.lms_order);
    const std::vector<int> shape = predictor.latent_shape();

    Tensor z = scale(normal_sample(rng, shape), sampler.init_scale());
    SafetyState state = SafetyState::initial(shape);
    const Condition uncond = Condition::unconditional();

    for (int t = 0; t < sampler.num_steps(); ++t) {
        double sigma = sampler.sigma(t);
        NoiseTriple triple{predictor.predict(z, sigma, uncond),
                           predictor.predict(z, sigma, prompt),
                           predictor.predict(z, sigma, safety)};
        auto [eps, next_state] = guidance_step(triple, state, config, t);
        state = std::move(next_state);
        z = sampler.step(z, eps);
    }
    return z;
}

std::vector<Tensor> sample_many(const NoisePredictor& predictor, const NoiseSchedule& schedule,
                                const SamplingOptions& options, const GuidanceConfig& config,
                                const Condition& prompt, const Condition& safety,
                                std::uint64_t seed, int count) {
    if (count < 1) {
        throw std::invalid_argument("sample_many: count must be >= 1");
    }
    Rng master(seed);
    std::vector<Tensor> out;
    out.reserve(count);
    for (int j = 0; j < count; ++j) {
        Rng trajectory_rng = master.split(static_cast<std::uint64_t>(j));
        out.push_back(sample_trajectory(predictor, schedule, options, config, prompt, safety,
                                        trajectory_rng));
    }
    return out;
}

}  // namespace sgdiff
