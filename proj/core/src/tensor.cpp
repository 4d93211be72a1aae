#include "sgdiff/tensor.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace sgdiff {

namespace {

std::size_t checked_element_count(const std::vector<int>& shape) {
    if (shape.empty()) {
        throw std::invalid_argument("tensor shape must be nonempty");
    }
    std::size_t n = 1;
    for (int d : shape) {
        if (d <= 0) {
            throw std::invalid_argument("tensor shape entries must be positive, got " +
                                        shape_string(shape));
        }
        n *= static_cast<std::size_t>(d);
    }
    return n;
}

void check_finite(const std::vector<double>& data) {
    for (double v : data) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("tensor contains a non-finite value");
        }
    }
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": shape mismatch " +
                                    shape_string(a.shape()) + " vs " + shape_string(b.shape()));
    }
}

}  // namespace

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(checked_element_count(shape_), 0.0) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (checked_element_count(shape_) != data_.size()) {
        throw std::invalid_argument("tensor data length does not match shape " +
                                    shape_string(shape_));
    }
    check_finite(data_);
}

Tensor Tensor::full(std::vector<int> shape, double value) {
    std::size_t n = checked_element_count(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

bool Tensor::identical(const Tensor& other) const {
    if (shape_ != other.shape_ || data_.size() != other.data_.size()) {
        return false;
    }
    return data_.empty() ||
           std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0;
}

Tensor elementwise(BinaryOp op, const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "elementwise");
    std::vector<double> out(a.size());
    const auto av = a.values();
    const auto bv = b.values();
    switch (op) {
        case BinaryOp::Add:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
            break;
        case BinaryOp::Sub:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
            break;
        case BinaryOp::Mul:
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
            break;
    }
    return Tensor(a.shape(), std::move(out));
}

Tensor add(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::Add, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::Sub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(BinaryOp::Mul, a, b); }

Tensor where_lt(const Tensor& a, const Tensor& b, double threshold,
                const Tensor& then, double else_val) {
    check_same_shape(a, b, "where_lt");
    check_same_shape(a, then, "where_lt");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (a[i] - b[i] < threshold) ? then[i] : else_val;
    }
    return Tensor(a.shape(), std::move(out));
}

Tensor scale(const Tensor& a, double s) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a[i];
    return Tensor(a.shape(), std::move(out));
}

Tensor add_scaled(const Tensor& a, const Tensor& b, double s) {
    check_same_shape(a, b, "add_scaled");
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + s * b[i];
    return Tensor(a.shape(), std::move(out));
}

Tensor abs(const Tensor& a) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::fabs(a[i]);
    return Tensor(a.shape(), std::move(out));
}

Tensor max_scalar(const Tensor& a, double floor) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(a[i], floor);
    return Tensor(a.shape(), std::move(out));
}

Tensor min_scalar(const Tensor& a, double ceiling) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(a[i], ceiling);
    return Tensor(a.shape(), std::move(out));
}

double mean(const Tensor& a) {
    double sum = 0.0;
    for (double v : a.values()) sum += v;
    return sum / static_cast<double>(a.size());
}

double variance(const Tensor& a) {
    double m = mean(a);
    double sum = 0.0;
    for (double v : a.values()) sum += (v - m) * (v - m);
    return sum / static_cast<double>(a.size());
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::fabs(a[i] - b[i]));
    }
    return worst;
}

std::string shape_string(const std::vector<int>& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) s += ", ";
        s += std::to_string(shape[i]);
    }
    s += "]";
    return s;
}

}  // namespace sgdiff
