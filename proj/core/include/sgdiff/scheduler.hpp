#pragma once

#include <span>
#include <vector>

#include "sgdiff/tensor.hpp"

namespace sgdiff {

enum class ScheduleKind { Linear, ScaledLinear };

// Discrete noise schedule over training timesteps. Linear interpolates the
// betas directly between the endpoints; ScaledLinear interpolates in
// square-root space and squares (the convention used by deployed latent
// diffusion checkpoints). Endpoints are pinned exactly in both kinds.
struct NoiseSchedule {
    int num_train_steps = 0;
    ScheduleKind kind = ScheduleKind::Linear;
    std::vector<double> betas;
    std::vector<double> alphas_cumprod;  // cumulative product of (1 - beta)
};

NoiseSchedule build_schedule(int num_train_steps, double beta_start, double beta_end,
                             ScheduleKind kind);

// sigma_t = sqrt((1 - abar_t) / abar_t) evaluated at num_inference_steps evenly
// spaced training timesteps in descending order, with linear interpolation in
// sigma at fractional timesteps and a terminal 0 appended. The result has
// num_inference_steps + 1 entries and is strictly decreasing.
std::vector<double> inference_sigmas(const NoiseSchedule& schedule, int num_inference_steps);

// Coefficient k of the multistep update at step_index: the integral over
// [sigma_i, sigma_i+1] of the Lagrange basis polynomial through the most
// recent `order` sigma points. Evaluated with fixed 4-node Gauss-Legendre
// quadrature, which is exact for the polynomial integrands that occur here
// (degree <= order - 1 <= 3); order 1 short-circuits to sigma_i+1 - sigma_i.
std::vector<double> lms_coefficients(std::span<const double> sigmas, int step_index, int order);

// Linear multistep sampler over a fixed descending sigma grid. The combined
// noise estimate is the derivative in sigma space, so the update is
//
//     z <- z + sum_k coeff_k * d_{i-k}
//
// with order 1 reducing to the explicit Euler step. The effective order grows
// with the number of recorded derivatives until it reaches the configured one.
//
// Initial latents are expected to be drawn as sqrt(sigma_max^2 + 1) * N(0, I);
// init_scale() exposes that factor so predictors and callers agree.
class LmsSampler {
public:
    explicit LmsSampler(std::vector<double> sigmas, int order = 4);

    int num_steps() const { return static_cast<int>(sigmas_.size()) - 1; }
    int step_index() const { return step_index_; }
    int order() const { return order_; }
    double sigma(int i) const;
    double sigma_max() const { return sigmas_.front(); }
    double init_scale() const;
    const std::vector<double>& sigmas() const { return sigmas_; }

    // Coefficients for the current step at the given (clamped) order.
    std::vector<double> coefficients(int order) const;

    // Advance one step; eps is the combined noise estimate at sigma(step_index()).
    Tensor step(const Tensor& z, const Tensor& eps);

private:
    std::vector<double> sigmas_;
    int order_ = 4;
    int step_index_ = 0;
    std::vector<Tensor> history_;  // most recent derivative first
};

}  // namespace sgdiff
