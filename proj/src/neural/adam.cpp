#include "tickerlab/neural/adam.h"

#include <cmath>

#include "tickerlab/error.h"

namespace tickerlab::nn {

AdamMoments AdamMoments::zeros_like(const Tensor& param) {
    return {nn::zeros_like(param), nn::zeros_like(param)};
}

void adam_update(Tensor& param, const Tensor& grad, AdamMoments& moments, std::size_t step,
                 const AdamConfig& config) {
    if (!param.same_shape(grad) || !param.same_shape(moments.first) ||
        !param.same_shape(moments.second)) {
        throw Error(ErrorCode::kShapeMismatch, "adam parameter/gradient/moment shapes");
    }
    if (step < 1) {
        throw Error(ErrorCode::kInvalidConfig, "adam step counts from 1");
    }
    const double b1 = config.beta1;
    const double b2 = config.beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step));
    auto p = param.values();
    auto g = grad.values();
    auto m = moments.first.values();
    auto v = moments.second.values();
    for (std::size_t k = 0; k < p.size(); ++k) {
        m[k] = b1 * m[k] + (1.0 - b1) * g[k];
        v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
        const double m_hat = m[k] / correction1;
        const double v_hat = v[k] / correction2;
        p[k] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
}

AdamOptimizer::AdamOptimizer(std::vector<Tensor*> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {
    moments_.reserve(params_.size());
    for (const Tensor* p : params_) {
        moments_.push_back(AdamMoments::zeros_like(*p));
    }
}

void AdamOptimizer::step(const std::vector<const Tensor*>& grads) {
    if (grads.size() != params_.size()) {
        throw Error(ErrorCode::kShapeMismatch, "gradient list length");
    }
    ++step_;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        adam_update(*params_[i], *grads[i], moments_[i], step_, config_);
    }
}

}  // namespace tickerlab::nn
