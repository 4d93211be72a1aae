#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sgdiff {

// Dense row-major tensor of doubles. The numeric substrate for latents and
// noise estimates: no broadcasting, no views, values immutable once built.
// Every public operation validates that all entries are finite.
class Tensor {
public:
    Tensor() = default;

    // Zero-filled tensor of the given shape.
    explicit Tensor(std::vector<int> shape);

    // Takes ownership of a flat row-major buffer; product(shape) must equal data.size().
    Tensor(std::vector<int> shape, std::vector<double> data);

    static Tensor full(std::vector<int> shape, double value);

    const std::vector<int>& shape() const { return shape_; }
    std::size_t size() const { return data_.size(); }
    std::span<const double> values() const { return data_; }

    double operator[](std::size_t i) const { return data_[i]; }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    // Bitwise equality of shape and payload (distinguishes -0.0 from 0.0).
    bool identical(const Tensor& other) const;

private:
    std::vector<int> shape_;
    std::vector<double> data_;
};

enum class BinaryOp { Add, Sub, Mul };

Tensor elementwise(BinaryOp op, const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

// result[i] = then[i] if a[i] - b[i] < threshold, else else_val.
Tensor where_lt(const Tensor& a, const Tensor& b, double threshold,
                const Tensor& then, double else_val);

Tensor scale(const Tensor& a, double s);

// a + s * b
Tensor add_scaled(const Tensor& a, const Tensor& b, double s);

Tensor abs(const Tensor& a);
Tensor max_scalar(const Tensor& a, double floor);
Tensor min_scalar(const Tensor& a, double ceiling);

double mean(const Tensor& a);
double variance(const Tensor& a);  // population variance
double max_abs_diff(const Tensor& a, const Tensor& b);

std::string shape_string(const std::vector<int>& shape);

}  // namespace sgdiff
