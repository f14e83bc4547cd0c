#include "tickerlab/neural/conv1d.h"

#include <string>

#include "tickerlab/error.h"
#include "tickerlab/neural/activations.h"

namespace tickerlab::nn {

Conv1dResult conv1d_forward(const Tensor& inputs, const Conv1dParams& p) {
    if (p.kernels.rank() != 3 || p.bias.size() != p.filters()) {
        throw Error(ErrorCode::kShapeMismatch, "inconsistent conv1d parameters");
    }
    if (inputs.rank() != 2 || inputs.dim(1) != p.in_channels()) {
        throw Error(ErrorCode::kShapeMismatch, "conv1d inputs must be (timesteps, in_channels)");
    }
    const std::size_t steps = inputs.dim(0);
    const std::size_t width = p.kernel_width();
    if (steps < width) {
        throw Error(ErrorCode::kWindowTooSmall, std::to_string(steps) + " timesteps for kernel width " +
                                                    std::to_string(width));
    }
    const std::size_t out_steps = steps - width + 1;
    const std::size_t channels = p.in_channels();
    Conv1dResult r{Tensor({out_steps, p.filters()}), Tensor({out_steps, p.filters()})};
    for (std::size_t t = 0; t < out_steps; ++t) {
        for (std::size_t f = 0; f < p.filters(); ++f) {
            double acc = p.bias[f];
            for (std::size_t k = 0; k < width; ++k) {
                for (std::size_t c = 0; c < channels; ++c) {
                    acc += p.kernels.at(f, k, c) * inputs.at(t + k, c);
                }
            }
            r.pre_activation.at(t, f) = acc;
            r.output.at(t, f) = relu(acc);
        }
    }
    return r;
}

Tensor conv1d_backward(const Tensor& inputs, const Conv1dResult& forward,
                       const Tensor& grad_output, const Conv1dParams& p,
                       Conv1dParams& param_grads) {
    if (!grad_output.same_shape(forward.output) || !param_grads.kernels.same_shape(p.kernels) ||
        !param_grads.bias.same_shape(p.bias)) {
        throw Error(ErrorCode::kShapeMismatch, "conv1d backward shapes");
    }
    const std::size_t out_steps = forward.output.dim(0);
    const std::size_t width = p.kernel_width();
    const std::size_t channels = p.in_channels();
    if (inputs.rank() != 2 || inputs.dim(0) != out_steps + width - 1 || inputs.dim(1) != channels) {
        throw Error(ErrorCode::kShapeMismatch, "conv1d backward inputs");
    }
    Tensor grad_inputs = zeros_like(inputs);
    for (std::size_t t = 0; t < out_steps; ++t) {
        for (std::size_t f = 0; f < p.filters(); ++f) {
            if (!(forward.pre_activation.at(t, f) > 0.0)) {
                continue;
            }
            const double g = grad_output.at(t, f);
            param_grads.bias[f] += g;
            for (std::size_t k = 0; k < width; ++k) {
                for (std::size_t c = 0; c < channels; ++c) {
                    param_grads.kernels.at(f, k, c) += g * inputs.at(t + k, c);
                    grad_inputs.at(t + k, c) += g * p.kernels.at(f, k, c);
                }
            }
        }
    }
    return grad_inputs;
}

}  // namespace tickerlab::nn
