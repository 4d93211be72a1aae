#include "sgdiff/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgdiff {

NoiseSchedule build_schedule(int num_train_steps, double beta_start, double beta_end,
                             ScheduleKind kind) {
    if (num_train_steps < 1) {
        throw std::invalid_argument("build_schedule: num_train_steps must be >= 1");
    }
    if (!(beta_start > 0.0) || !(beta_start <= beta_end) || !(beta_end < 1.0)) {
        throw std::invalid_argument("build_schedule: need 0 < beta_start <= beta_end < 1");
    }

    NoiseSchedule s;
    s.num_train_steps = num_train_steps;
    s.kind = kind;
    s.betas.resize(num_train_steps);

    if (num_train_steps == 1) {
        s.betas[0] = beta_start;
    } else if (kind == ScheduleKind::Linear) {
        double step = (beta_end - beta_start) / (num_train_steps - 1);
        for (int i = 0; i < num_train_steps; ++i) {
            s.betas[i] = beta_start + step * i;
        }
    } else {
        double lo = std::sqrt(beta_start);
        double hi = std::sqrt(beta_end);
        double step = (hi - lo) / (num_train_steps - 1);
        for (int i = 0; i < num_train_steps; ++i) {
            double r = lo + step * i;
            s.betas[i] = r * r;
        }
    }
    // interpolation endpoints are exact by contract
    s.betas.front() = beta_start;
    if (num_train_steps > 1) {
        s.betas.back() = beta_end;
    }

    s.alphas_cumprod.resize(num_train_steps);
    double product = 1.0;
    for (int i = 0; i < num_train_steps; ++i) {
        product *= 1.0 - s.betas[i];
        s.alphas_cumprod[i] = product;
    }
    return s;
}

std::vector<double> inference_sigmas(const NoiseSchedule& schedule, int num_inference_steps) {
    int n = schedule.num_train_steps;
    if (num_inference_steps < 1 || num_inference_steps > n) {
        throw std::invalid_argument("inference_sigmas: need 1 <= num_inference_steps <= num_train_steps");
    }

    std::vector<double> sigma_at(n);
    for (int t = 0; t < n; ++t) {
        double abar = schedule.alphas_cumprod[t];
        sigma_at[t] = std::sqrt((1.0 - abar) / abar);
    }

    std::vector<double> out;
    out.reserve(num_inference_steps + 1);
    if (num_inference_steps == 1) {
        out.push_back(sigma_at[n - 1]);
    } else {
        double spacing = static_cast<double>(n - 1) / (num_inference_steps - 1);
        for (int i = 0; i < num_inference_steps; ++i) {
            double t = (n - 1) - spacing * i;  // descending
            int lo = static_cast<int>(std::floor(t));
            int hi = static_cast<int>(std::ceil(t));
            double w = t - lo;
            out.push_back((1.0 - w) * sigma_at[lo] + w * sigma_at[hi]);
        }
        out.front() = sigma_at[n - 1];
        out.back() = sigma_at[0];
    }
    out.push_back(0.0);
    return out;
}

namespace {

// 4-node Gauss-Legendre rule on [-1, 1]; exact through degree 7.
constexpr double kGlNodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                0.3399810435848563, 0.8611363115940526};
constexpr double kGlWeights[4] = {0.3478548451374538, 0.6521451548625461,
                                  0.6521451548625461, 0.3478548451374538};

double lagrange_basis(double tau, std::span<const double> sigmas, int step_index, int order,
                      int k) {
    double prod = 1.0;
    for (int j = 0; j < order; ++j) {
        if (j == k) continue;
        prod *= (tau - sigmas[step_index - j]) / (sigmas[step_index - k] - sigmas[step_index - j]);
    }
    return prod;
}

}  // namespace

std::vector<double> lms_coefficients(std::span<const double> sigmas, int step_index, int order) {
    if (step_index < 0 || step_index + 1 >= static_cast<int>(sigmas.size())) {
        throw std::invalid_argument("lms_coefficients: step_index out of range");
    }
    if (order < 1) {
        throw std::invalid_argument("lms_coefficients: order must be >= 1");
    }
    // effective order is limited by the number of sigma points behind step_index
    order = std::min(order, step_index + 1);

    double a = sigmas[step_index];
    double b = sigmas[step_index + 1];
    std::vector<double> coeffs(order);
    if (order == 1) {
        coeffs[0] = b - a;
        return coeffs;
    }
    double half = 0.5 * (b - a);
    double mid = 0.5 * (a + b);
    for (int k = 0; k < order; ++k) {
        double acc = 0.0;
        for (int g = 0; g < 4; ++g) {
            acc += kGlWeights[g] * lagrange_basis(mid + half * kGlNodes[g], sigmas, step_index, order, k);
        }
        coeffs[k] = acc * half;
    }
    return coeffs;
}

LmsSampler::LmsSampler(std::vector<double> sigmas, int order)
    : sigmas_(std::move(sigmas)), order_(order) {
    if (order_ < 1) {
        throw std::invalid_argument("LmsSampler: order must be >= 1");
    }
    if (sigmas_.size() < 2) {
        throw std::invalid_argument("LmsSampler: need at least one step");
    }
    if (sigmas_.back() != 0.0) {
        throw std::invalid_argument("LmsSampler: sigma grid must end at 0");
    }
    for (std::size_t i = 1; i < sigmas_.size(); ++i) {
        if (!(sigmas_[i] < sigmas_[i - 1])) {
            throw std::invalid_argument("LmsSampler: sigmas must be strictly decreasing");
        }
    }
    history_.reserve(order_);
}

double LmsSampler::sigma(int i) const {
    if (i < 0 || i >= static_cast<int>(sigmas_.size())) {
        throw std::invalid_argument("LmsSampler: sigma index out of range");
    }
    return sigmas_[i];
}

double LmsSampler::init_scale() const {
    return std::sqrt(sigma_max() * sigma_max() + 1.0);
}

std::vector<double> LmsSampler::coefficients(int order) const {
    return lms_coefficients(sigmas_, step_index_, order);
}

Tensor LmsSampler::step(const Tensor& z, const Tensor& eps) {
    if (step_index_ >= num_steps()) {
        throw std::logic_error("LmsSampler: step called past the final step");
    }
    // the eps-prediction is the derivative in sigma space
    history_.insert(history_.begin(), eps);
    if (static_cast<int>(history_.size()) > order_) {
        history_.pop_back();
    }

    int effective = std::min(static_cast<int>(history_.size()), step_index_ + 1);
    std::vector<double> coeffs = lms_coefficients(sigmas_, step_index_, effective);

    std::vector<double> out(z.values().begin(), z.values().end());
    for (int k = 0; k < effective; ++k) {
        const Tensor& d = history_[k];
        if (!d.same_shape(z)) {
            throw std::invalid_argument("LmsSampler: derivative shape mismatch " +
                                        shape_string(d.shape()) + " vs " + shape_string(z.shape()));
        }
        double c = coeffs[k];
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += c * d[i];
        }
    }
    ++step_index_;
    return Tensor(z.shape(), std::move(out));
}

}  // namespace sgdiff
