#include "sgdiff/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sgdiff {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}

std::uint64_t Rng::mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

std::uint64_t Rng::next_u64() {
    ++counter_;
    return mix(seed_ + counter_ * kGolden);
}

double Rng::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::next_normal() {
    // u1 in (0, 1] so the log is finite.
    double u1 = 1.0 - next_uniform();
    double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::next_index(std::uint64_t bound) {
    if (bound == 0) {
        throw std::invalid_argument("next_index: bound must be positive");
    }
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
}

Rng Rng::split(std::uint64_t stream) const {
    return Rng(mix(seed_ ^ mix(stream + kGolden)));
}

Tensor normal_sample(Rng& rng, const std::vector<int>& shape) {
    Tensor proto(shape);  // validates the shape
    std::vector<double> out(proto.size());
    for (std::size_t i = 0; i + 1 < out.size(); i += 2) {
        double u1 = 1.0 - rng.next_uniform();
        double u2 = rng.next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        out[i] = r * std::cos(2.0 * std::numbers::pi * u2);
        out[i + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
    }
    if (out.size() % 2 == 1) {
        out.back() = rng.next_normal();
    }
    return Tensor(shape, std::move(out));
}

}  // namespace sgdiff
