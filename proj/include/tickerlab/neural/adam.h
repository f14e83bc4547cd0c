#pragma once

#include <cstddef>
#include <vector>

#include "tickerlab/neural/tensor.h"

namespace tickerlab::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// First and second moment estimates for one parameter tensor.
struct AdamMoments {
    Tensor first;
    Tensor second;

    static AdamMoments zeros_like(const Tensor& param);
};

// One bias-corrected Adam step; `step` counts from 1.
void adam_update(Tensor& param, const Tensor& grad, AdamMoments& moments, std::size_t step,
                 const AdamConfig& config);

// Adam over a fixed list of parameter tensors.
class AdamOptimizer {
public:
    AdamOptimizer(std::vector<Tensor*> params, AdamConfig config);

    void step(const std::vector<const Tensor*>& grads);
    std::size_t steps_taken() const noexcept { return step_; }

private:
    std::vector<Tensor*> params_;
    std::vector<AdamMoments> moments_;
    AdamConfig config_;
    std::size_t step_ = 0;
};

}  // namespace tickerlab::nn
