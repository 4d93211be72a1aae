#pragma once

#include <cstdint>
#include <vector>

#include "sgdiff/tensor.hpp"

namespace sgdiff {

// Counter-based deterministic generator. Draw k of a stream with seed s is
//
//     u64(k) = mix(s + (k + 1) * 0x9E3779B97F4A7C15)
//
// where mix is the splitmix64 finalizer (xor-shift / multiply rounds with the
// constants 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). The state is just
// (seed, counter), so a stream is reproducible from the seed alone and
// independent of platform. Uniform doubles take the top 53 bits; normals use
// the Box-Muller transform, consuming uniforms in pairs (a call producing n
// normals always advances the counter by 2*ceil(n/2)).
//
// Independent substreams come from split(stream):
//
//     child_seed = mix(seed ^ mix(stream + 0x9E3779B97F4A7C15))
//
// This is the project-wide rule for deriving per-trajectory and per-resample
// seeds from a master seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53-bit resolution.
    double next_uniform();

    // Standard normal; consumes one full Box-Muller pair (two uniforms).
    double next_normal();

    // Uniform integer in [0, bound) via the 128-bit multiply reduction.
    std::uint64_t next_index(std::uint64_t bound);

    // Independent child stream; pure function of (seed, stream), does not
    // advance this generator.
    Rng split(std::uint64_t stream) const;

    static std::uint64_t mix(std::uint64_t x);

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

// i.i.d. standard-normal tensor; advances rng.
Tensor normal_sample(Rng& rng, const std::vector<int>& shape);

}  // namespace sgdiff
