#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tickerlab::nn {

// Dense row-major array of doubles with an explicit shape.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
    Tensor(std::vector<std::size_t> shape, std::vector<double> values);

    const std::vector<std::size_t>& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double* data() noexcept { return values_.data(); }
    const double* data() const noexcept { return values_.data(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    double& at(std::size_t i, std::size_t j) { return values_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return values_[i * shape_[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return values_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return values_[(i * shape_[1] + j) * shape_[2] + k];
    }

    // Contiguous view of row `i` along the leading axis.
    std::span<double> row(std::size_t i);
    std::span<const double> row(std::size_t i) const;

    void fill(double value);
    bool same_shape(const Tensor& other) const noexcept { return shape_ == other.shape_; }

    // Throws NonFiniteActivation naming `where` if any value is NaN/Inf.
    void check_finite(std::string_view where) const;

    bool operator==(const Tensor&) const = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> values_;
};

Tensor zeros_like(const Tensor& t);

// y += M x, with M of shape (rows x cols).
void gemv_add(const Tensor& m, std::span<const double> x, std::span<double> y);
// y += M^T g
void gemv_transposed_add(const Tensor& m, std::span<const double> g, std::span<double> y);
// M += g x^T
void outer_add(Tensor& m, std::span<const double> g, std::span<const double> x);

}  // namespace tickerlab::nn
