#include "tickerlab/neural/tensor.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "tickerlab/error.h"

namespace tickerlab::nn {

namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), values_(element_count(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
    if (values_.size() != element_count(shape_)) {
        throw Error(ErrorCode::kShapeMismatch,
                    std::to_string(values_.size()) + " values for shape of " +
                        std::to_string(element_count(shape_)));
    }
}

std::span<double> Tensor::row(std::size_t i) {
    const std::size_t stride = values_.size() / shape_.at(0);
    return std::span<double>(values_).subspan(i * stride, stride);
}

std::span<const double> Tensor::row(std::size_t i) const {
    const std::size_t stride = values_.size() / shape_.at(0);
    return std::span<const double>(values_).subspan(i * stride, stride);
}

void Tensor::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

void Tensor::check_finite(std::string_view where) const {
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::kNonFiniteActivation, std::string(where));
        }
    }
}

Tensor zeros_like(const Tensor& t) { return Tensor(t.shape()); }

void gemv_add(const Tensor& m, std::span<const double> x, std::span<double> y) {
    const std::size_t rows = m.dim(0);
    const std::size_t cols = m.dim(1);
    const double* w = m.data();
    for (std::size_t r = 0; r < rows; ++r) {
        const double* wr = w + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            acc += wr[c] * x[c];
        }
        y[r] += acc;
    }
}

void gemv_transposed_add(const Tensor& m, std::span<const double> g, std::span<double> y) {
    const std::size_t rows = m.dim(0);
    const std::size_t cols = m.dim(1);
    const double* w = m.data();
    for (std::size_t r = 0; r < rows; ++r) {
        const double gr = g[r];
        if (gr == 0.0) {
            continue;
        }
        const double* wr = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            y[c] += wr[c] * gr;
        }
    }
}

void outer_add(Tensor& m, std::span<const double> g, std::span<const double> x) {
    const std::size_t rows = m.dim(0);
    const std::size_t cols = m.dim(1);
    double* w = m.data();
    for (std::size_t r = 0; r < rows; ++r) {
        const double gr = g[r];
        if (gr == 0.0) {
            continue;
        }
        double* wr = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            wr[c] += gr * x[c];
        }
    }
}

}  // namespace tickerlab::nn
