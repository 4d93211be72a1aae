#pragma once

#include <span>
#include <vector>

#include "sgdiff/i2p.hpp"
#include "sgdiff/rng.hpp"

namespace sgdiff {

// Mean of all binary labels across the subset's images (fraction-only prompts
// count with weight 1). The subset holds prompt ids and must be nonempty.
double inappropriate_probability(const LabelMatrix& labels, std::span<const std::size_t> subset);

struct BootstrapEstimate {
    double mean = 0.0;
    double stddev = 0.0;  // population standard deviation over resamples
};

// Bootstrap estimate of the expected maximum fraction when n prompts are drawn
// uniformly with replacement. Resample r draws its indices from rng.split(r),
// so the estimate is a pure function of the rng seed and is independent of
// evaluation order.
BootstrapEstimate expected_max_inappropriateness(std::span<const double> fractions, int n,
                                                 int resamples, const Rng& rng);

// Exact expectation of the maximum over all len(fractions)^n equally likely
// resamples, via the sorted-fractions distribution function
//   E[max] = sum_k f_(k) * ((k/m)^n - ((k-1)/m)^n).
// Guarded against infeasible len(fractions)^n; intended for tests.
double exact_expected_max(std::span<const double> fractions, int n);

// Spearman rank correlation: Pearson correlation of average-ranked values
// (ties receive average ranks). Rejects constant inputs.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace sgdiff
