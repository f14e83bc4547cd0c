#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tickerlab/neural/tensor.h"

namespace tickerlab::nn {

struct DenseParams {
    Tensor weights;  // (out, in)
    Tensor bias;     // (out)

    DenseParams() = default;
    DenseParams(std::size_t in, std::size_t out) : weights({out, in}), bias({out}) {}

    std::size_t input_size() const { return weights.dim(1); }
    std::size_t output_size() const { return weights.dim(0); }

    std::vector<Tensor*> tensors() { return {&weights, &bias}; }
    std::vector<const Tensor*> tensors() const { return {&weights, &bias}; }

    bool operator==(const DenseParams&) const = default;
};

// y = W x + b
std::vector<double> dense_forward(std::span<const double> x, const DenseParams& p);

// Adds dL/dW and dL/db into `param_grads`; returns dL/dx.
std::vector<double> dense_backward(std::span<const double> x, std::span<const double> grad_output,
                                   const DenseParams& p, DenseParams& param_grads);

}  // namespace tickerlab::nn
