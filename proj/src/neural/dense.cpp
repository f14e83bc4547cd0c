#include "tickerlab/neural/dense.h"

#include "tickerlab/error.h"

namespace tickerlab::nn {

std::vector<double> dense_forward(std::span<const double> x, const DenseParams& p) {
    if (p.weights.rank() != 2 || p.bias.size() != p.weights.dim(0) || x.size() != p.input_size()) {
        throw Error(ErrorCode::kShapeMismatch, "dense input width");
    }
    std::vector<double> y(p.bias.values().begin(), p.bias.values().end());
    gemv_add(p.weights, x, y);
    return y;
}

std::vector<double> dense_backward(std::span<const double> x, std::span<const double> grad_output,
                                   const DenseParams& p, DenseParams& param_grads) {
    if (x.size() != p.input_size() || grad_output.size() != p.output_size() ||
        !param_grads.weights.same_shape(p.weights) || !param_grads.bias.same_shape(p.bias)) {
        throw Error(ErrorCode::kShapeMismatch, "dense backward shapes");
    }
    outer_add(param_grads.weights, grad_output, x);
    auto db = param_grads.bias.values();
    for (std::size_t k = 0; k < grad_output.size(); ++k) {
        db[k] += grad_output[k];
    }
    std::vector<double> dx(x.size(), 0.0);
    gemv_transposed_add(p.weights, grad_output, dx);
    return dx;
}

}  // namespace tickerlab::nn
