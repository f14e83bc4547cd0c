#pragma once

// Analytic-versus-central-difference checks for the neural layers. Each
// function draws one random problem and returns the worst relative error
// over every parameter and input gradient.

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.h"
#include "tickerlab/neural/conv1d.h"
#include "tickerlab/neural/dense.h"
#include "tickerlab/neural/lstm.h"

namespace tickerlab::oracle {

inline double check_all(std::vector<nn::Tensor*> params, const std::vector<const nn::Tensor*>& analytic,
                        const std::function<double()>& loss) {
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        worst = std::max(worst, max_relative_error(*analytic[i], numeric_gradient(*params[i], loss)));
    }
    return worst;
}

// Loss = sum over steps of G[t] . h_t for a random upstream matrix G.
inline double lstm_gradient_error(std::mt19937_64& rng, std::size_t input, std::size_t hidden,
                                  std::size_t steps) {
    nn::LstmCellParams p(input, hidden);
    for (nn::Tensor* t : p.tensors()) randomize(*t, rng, 0.8);
    nn::Tensor x = random_tensor({steps, input}, rng, 1.0);
    nn::LstmStepState init{random_vector(rng, hidden, -0.5, 0.5), random_vector(rng, hidden, -0.5, 0.5)};
    const nn::Tensor g = random_tensor({steps, hidden}, rng, 1.0);

    auto loss = [&] {
        const auto seq = nn::lstm_sequence_forward(x, p, init);
        return weighted_sum(g.values(), seq.hidden_sequence().values());
    };
    const auto seq = nn::lstm_sequence_forward(x, p, init);
    nn::LstmCellParams grads(input, hidden);
    const nn::Tensor dx = nn::lstm_backward(g, seq.caches, p, grads);

    std::vector<nn::Tensor*> params = p.tensors();
    std::vector<const nn::Tensor*> analytic = std::as_const(grads).tensors();
    params.push_back(&x);
    analytic.push_back(&dx);
    return check_all(params, analytic, loss);
}

// Loss = G . (W x + b).
inline double dense_gradient_error(std::mt19937_64& rng, std::size_t in, std::size_t out) {
    nn::DenseParams p(in, out);
    for (nn::Tensor* t : p.tensors()) randomize(*t, rng, 1.0);
    nn::Tensor x = random_tensor({in}, rng, 1.0);
    const auto g = random_vector(rng, out);

    auto loss = [&] { return weighted_sum(g, nn::dense_forward(x.values(), p)); };
    nn::DenseParams grads(in, out);
    const auto dx_values = nn::dense_backward(x.values(), g, p, grads);
    const nn::Tensor dx({in}, dx_values);

    std::vector<nn::Tensor*> params = p.tensors();
    std::vector<const nn::Tensor*> analytic = std::as_const(grads).tensors();
    params.push_back(&x);
    analytic.push_back(&dx);
    return check_all(params, analytic, loss);
}

// Loss = G . relu(conv(x)). Draws are repeated until every pre-activation is
// clear of the ReLU kink by more than the difference step.
inline double conv1d_gradient_error(std::mt19937_64& rng, std::size_t channels, std::size_t filters,
                                    std::size_t width, std::size_t steps) {
    nn::Conv1dParams p(channels, filters, width);
    nn::Tensor x;
    for (;;) {
        for (nn::Tensor* t : p.tensors()) randomize(*t, rng, 1.0);
        x = random_tensor({steps, channels}, rng, 1.0);
        const auto fwd = nn::conv1d_forward(x, p);
        const auto pre = fwd.pre_activation.values();
        if (std::all_of(pre.begin(), pre.end(), [](double v) { return std::abs(v) > 1e-3; })) {
            break;
        }
    }
    const nn::Tensor g = random_tensor({steps - width + 1, filters}, rng, 1.0);

    auto loss = [&] { return weighted_sum(g.values(), nn::conv1d_forward(x, p).output.values()); };
    const auto fwd = nn::conv1d_forward(x, p);
    nn::Conv1dParams grads(channels, filters, width);
    const nn::Tensor dx = nn::conv1d_backward(x, fwd, g, p, grads);

    std::vector<nn::Tensor*> params = p.tensors();
    std::vector<const nn::Tensor*> analytic = std::as_const(grads).tensors();
    params.push_back(&x);
    analytic.push_back(&dx);
    return check_all(params, analytic, loss);
}

}  // namespace tickerlab::oracle
