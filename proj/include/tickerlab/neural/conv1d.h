#pragma once

#include <cstddef>
#include <vector>

#include "tickerlab/neural/tensor.h"

namespace tickerlab::nn {

struct Conv1dParams {
    Tensor kernels;  // (filters, kernel_width, in_channels)
    Tensor bias;     // (filters)

    Conv1dParams() = default;
    Conv1dParams(std::size_t in_channels, std::size_t filters, std::size_t kernel_width)
        : kernels({filters, kernel_width, in_channels}), bias({filters}) {}

    std::size_t filters() const { return kernels.dim(0); }
    std::size_t kernel_width() const { return kernels.dim(1); }
    std::size_t in_channels() const { return kernels.dim(2); }

    std::vector<Tensor*> tensors() { return {&kernels, &bias}; }
    std::vector<const Tensor*> tensors() const { return {&kernels, &bias}; }

    bool operator==(const Conv1dParams&) const = default;
};

struct Conv1dResult {
    Tensor pre_activation;  // (out_steps, filters)
    Tensor output;          // relu(pre_activation)
};

// Valid cross-correlation (no kernel flip) followed by ReLU:
// out[t][f] = relu(b[f] + sum_{k,c} K[f][k][c] * in[t + k][c]),
// out_steps = timesteps - kernel_width + 1.
Conv1dResult conv1d_forward(const Tensor& inputs, const Conv1dParams& p);

// Adds kernel and bias gradients into `param_grads`; returns dL/dinputs.
Tensor conv1d_backward(const Tensor& inputs, const Conv1dResult& forward,
                       const Tensor& grad_output, const Conv1dParams& p,
                       Conv1dParams& param_grads);

}  // namespace tickerlab::nn
