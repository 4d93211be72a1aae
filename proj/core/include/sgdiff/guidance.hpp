#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sgdiff/tensor.hpp"

namespace sgdiff {

enum class GuidanceMode { PlainCfg, Sld, NegativePrompt };

// Behavior of the element-wise safety scale when it is active:
//   PaperLiteral  mu = max(1, |phi|)   (lower bound at 1, unbounded above)
//   UpperClipAt1  mu = min(1, |phi|)   (clipped at 1 from above)
enum class ScaleClip { PaperLiteral, UpperClipAt1 };

struct GuidanceConfig {
    GuidanceMode mode = GuidanceMode::Sld;
    double text_scale = 7.5;       // strength of the prompt direction
    double safety_scale = 1000.0;  // element-wise scale applied inside mu
    double threshold = 0.01;       // activation threshold on prompt - safety
    int warmup_steps = 10;         // steps before the safety term is applied
    double momentum_scale = 0.3;   // weight of the momentum term inside gamma
    double momentum_decay = 0.4;   // decay of the momentum accumulator
    ScaleClip scale_clip = ScaleClip::PaperLiteral;

    // momentum_scale in [0,1], momentum_decay in [0,1), safety_scale >= 0,
    // 0 <= warmup_steps <= total_inference_steps.
    void validate(int total_inference_steps) const;
};

// Named hyper-parameter bundles of increasing aggressiveness:
// weak, medium, strong, max. Unknown names are rejected.
GuidanceConfig preset(const std::string& name);
const std::vector<std::string>& preset_names();

// Momentum accumulator carried across diffusion steps; starts at zero.
struct SafetyState {
    Tensor momentum;
    int step = 0;

    static SafetyState initial(const std::vector<int>& latent_shape);
};

// The three noise estimates of one diffusion step: unconditional,
// prompt-conditioned and safety-concept-conditioned. All shapes must match.
struct NoiseTriple {
    Tensor uncond;
    Tensor prompt;
    Tensor safety;
};

// uncond + s * (prompt - uncond); the safety estimate is ignored.
Tensor cfg_combine(const NoiseTriple& t, double text_scale);

// Element-wise scale mu: where prompt[i] - safety[i] < threshold the scale is
// active (see ScaleClip for its value, with phi = s * (prompt - safety)),
// otherwise 0.
Tensor safety_scale(const NoiseTriple& t, double safety_scale, double threshold,
                    ScaleClip clip = ScaleClip::PaperLiteral);

// gamma = mu * (safety - uncond) + momentum_scale * state.momentum
Tensor safety_gamma(const NoiseTriple& t, const Tensor& mu, const SafetyState& state,
                    const GuidanceConfig& config);

// momentum' = decay * momentum + (1 - decay) * gamma; step advances.
SafetyState momentum_update(const SafetyState& state, const Tensor& gamma,
                            double momentum_decay);

// Warm-up branch: before warmup_steps this equals cfg_combine exactly;
// afterwards uncond + s * (prompt - uncond - gamma).
Tensor sld_combine(const NoiseTriple& t, const Tensor& gamma, const GuidanceConfig& config,
                   int step);

// safety + s * (prompt - safety): plain guidance with the unconditional
// estimate replaced by the safety-conditioned one.
Tensor negative_prompt_combine(const NoiseTriple& t, double text_scale);

// One full guidance step. For sld mode: compute mu and gamma, update the
// momentum (also during warm-up), then emit the combined estimate for the
// active branch. plain-cfg and negative-prompt leave the momentum untouched.
// Requires state.step == step.
std::pair<Tensor, SafetyState> guidance_step(const NoiseTriple& t, const SafetyState& state,
                                             const GuidanceConfig& config, int step);

}  // namespace sgdiff
