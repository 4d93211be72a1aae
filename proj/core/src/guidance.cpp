#include "sgdiff/guidance.hpp"

#include <stdexcept>

namespace sgdiff {

void GuidanceConfig::validate(int total_inference_steps) const {
    if (!(momentum_scale >= 0.0 && momentum_scale <= 1.0)) {
        throw std::invalid_argument("guidance config: s_m must lie in [0, 1]");
    }
    if (!(momentum_decay >= 0.0 && momentum_decay < 1.0)) {
        throw std::invalid_argument("guidance config: beta_m must lie in [0, 1)");
    }
    if (!(safety_scale >= 0.0)) {
        throw std::invalid_argument("guidance config: s_S must be >= 0");
    }
    if (warmup_steps < 0 || warmup_steps > total_inference_steps) {
        throw std::invalid_argument("guidance config: delta must lie in [0, total inference steps]");
    }
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"weak", "medium", "strong", "max"};
    return names;
}

GuidanceConfig preset(const std::string& name) {
    GuidanceConfig c;
    c.mode = GuidanceMode::Sld;
    if (name == "weak") {
        c.warmup_steps = 15;
        c.safety_scale = 200.0;
        c.threshold = 0.0;
        c.momentum_scale = 0.0;
        c.momentum_decay = 0.0;  // momentum disabled; decay is irrelevant
    } else if (name == "medium") {
        c.warmup_steps = 10;
        c.safety_scale = 1000.0;
        c.threshold = 0.01;
        c.momentum_scale = 0.3;
        c.momentum_decay = 0.4;
    } else if (name == "strong") {
        c.warmup_steps = 7;
        c.safety_scale = 2000.0;
        c.threshold = 0.025;
        c.momentum_scale = 0.5;
        c.momentum_decay = 0.7;
    } else if (name == "max") {
        c.warmup_steps = 0;
        c.safety_scale = 5000.0;
        c.threshold = 1.0;
        c.momentum_scale = 0.5;
        c.momentum_decay = 0.7;
    } else {
        std::string valid;
        for (const auto& n : preset_names()) {
            if (!valid.empty()) valid += ", ";
            valid += n;
        }
        throw std::invalid_argument("unknown preset '" + name + "' (valid presets: " + valid + ")");
    }
    return c;
}

SafetyState SafetyState::initial(const std::vector<int>& latent_shape) {
    return SafetyState{Tensor(latent_shape), 0};
}

namespace {

void check_triple(const NoiseTriple& t, const char* what) {
    if (!t.uncond.same_shape(t.prompt) || !t.uncond.same_shape(t.safety)) {
        throw std::invalid_argument(std::string(what) + ": noise triple shapes differ: uncond " +
                                    shape_string(t.uncond.shape()) + ", prompt " +
                                    shape_string(t.prompt.shape()) + ", safety " +
                                    shape_string(t.safety.shape()));
    }
}

}  // namespace

Tensor cfg_combine(const NoiseTriple& t, double text_scale) {
    return add_scaled(t.uncond, sub(t.prompt, t.uncond), text_scale);
}

Tensor safety_scale(const NoiseTriple& t, double safety_scale, double threshold,
                    ScaleClip clip) {
    check_triple(t, "safety_scale");
    if (!(safety_scale >= 0.0)) {
        throw std::invalid_argument("safety_scale: s_S must be >= 0");
    }
    Tensor phi = scale(sub(t.prompt, t.safety), safety_scale);
    Tensor active = clip == ScaleClip::PaperLiteral ? max_scalar(abs(phi), 1.0)
                                                    : min_scalar(abs(phi), 1.0);
    return where_lt(t.prompt, t.safety, threshold, active, 0.0);
}

Tensor safety_gamma(const NoiseTriple& t, const Tensor& mu, const SafetyState& state,
                    const GuidanceConfig& config) {
    check_triple(t, "safety_gamma");
    return add_scaled(mul(mu, sub(t.safety, t.uncond)), state.momentum, config.momentum_scale);
}

SafetyState momentum_update(const SafetyState& state, const Tensor& gamma,
                            double momentum_decay) {
    Tensor next = add(scale(state.momentum, momentum_decay), scale(gamma, 1.0 - momentum_decay));
    return SafetyState{std::move(next), state.step + 1};
}

Tensor sld_combine(const NoiseTriple& t, const Tensor& gamma, const GuidanceConfig& config,
                   int step) {
    if (step < config.warmup_steps) {
        return cfg_combine(t, config.text_scale);
    }
    return add_scaled(t.uncond, sub(sub(t.prompt, t.uncond), gamma), config.text_scale);
}

Tensor negative_prompt_combine(const NoiseTriple& t, double text_scale) {
    return add_scaled(t.safety, sub(t.prompt, t.safety), text_scale);
}

std::pair<Tensor, SafetyState> guidance_step(const NoiseTriple& t, const SafetyState& state,
                                             const GuidanceConfig& config, int step) {
    check_triple(t, "guidance_step");
    if (state.step != step) {
        throw std::invalid_argument("guidance_step: state.step does not match the step index");
    }
    switch (config.mode) {
        case GuidanceMode::PlainCfg:
            return {cfg_combine(t, config.text_scale), SafetyState{state.momentum, step + 1}};
        case GuidanceMode::NegativePrompt:
            return {negative_prompt_combine(t, config.text_scale),
                    SafetyState{state.momentum, step + 1}};
        case GuidanceMode::Sld: {
            Tensor mu = safety_scale(t, config.safety_scale, config.threshold, config.scale_clip);
            Tensor gamma = safety_gamma(t, mu, state, config);
            // momentum builds up during warm-up even though gamma is not applied yet
            SafetyState next = momentum_update(state, gamma, config.momentum_decay);
            return {sld_combine(t, gamma, config, step), std::move(next)};
        }
    }
    throw std::invalid_argument("guidance_step: invalid guidance mode");
}

}  // namespace sgdiff
