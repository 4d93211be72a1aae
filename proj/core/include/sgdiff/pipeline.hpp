#pragma once

#include <cstdint>
#include <vector>

#include "sgdiff/guidance.hpp"
#include "sgdiff/mixture.hpp"
#include "sgdiff/rng.hpp"
#include "sgdiff/scheduler.hpp"

namespace sgdiff {

struct SamplingOptions {
    int num_inference_steps = 50;
    int lms_order = 4;
};

// Run one guided trajectory to sigma = 0 and return the terminal latent.
// The initial latent is sqrt(sigma_max^2 + 1) * N(0, I); every step evaluates
// the three noise estimates, applies guidance_step, then the sampler update.
// All randomness comes from rng (consumed only at initialization).
Tensor sample_trajectory(const NoisePredictor& predictor, const NoiseSchedule& schedule,
                         const SamplingOptions& options, const GuidanceConfig& config,
                         const Condition& prompt, const Condition& safety, Rng& rng);

// count independent trajectories; trajectory j draws from Rng(seed).split(j),
// so results are paired across configs sharing a seed and do not depend on
// evaluation order.
std::vector<Tensor> sample_many(const NoisePredictor& predictor, const NoiseSchedule& schedule,
                                const SamplingOptions& options, const GuidanceConfig& config,
                                const Condition& prompt, const Condition& safety,
                                std::uint64_t seed, int count);

}  // namespace sgdiff
