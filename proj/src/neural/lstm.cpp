#include "tickerlab/neural/lstm.h"

#include <cmath>
#include <string>

#include "tickerlab/error.h"
#include "tickerlab/neural/activations.h"

namespace tickerlab::nn {

namespace {

void require(bool ok, ErrorCode code, const char* what) {
    if (!ok) {
        throw Error(code, what);
    }
}

}  // namespace

LstmCellParams::LstmCellParams(std::size_t input, std::size_t hidden)
    : input_weights({4 * hidden, input}),
      recurrent_weights({4 * hidden, hidden}),
      bias({4 * hidden}) {}

std::span<double> LstmCellParams::gate_input_weights(Gate gate) {
    const std::size_t h = hidden_size();
    const std::size_t in = input_size();
    return input_weights.values().subspan(static_cast<std::size_t>(gate) * h * in, h * in);
}

std::span<double> LstmCellParams::gate_recurrent_weights(Gate gate) {
    const std::size_t h = hidden_size();
    return recurrent_weights.values().subspan(static_cast<std::size_t>(gate) * h * h, h * h);
}

std::span<double> LstmCellParams::gate_bias(Gate gate) {
    const std::size_t h = hidden_size();
    return bias.values().subspan(static_cast<std::size_t>(gate) * h, h);
}

LstmStepState LstmStepState::zeros(std::size_t hidden_size) {
    return {std::vector<double>(hidden_size, 0.0), std::vector<double>(hidden_size, 0.0)};
}

LstmCellResult lstm_cell_forward(std::span<const double> x, const LstmStepState& prev,
                                 const LstmCellParams& p) {
    const std::size_t h = p.hidden_size();
    require(p.input_weights.rank() == 2 && p.input_weights.dim(0) == 4 * h &&
                p.bias.size() == 4 * h,
            ErrorCode::kShapeMismatch, "inconsistent LSTM parameters");
    require(x.size() == p.input_size(), ErrorCode::kShapeMismatch, "LSTM input width");
    require(prev.hidden.size() == h && prev.cell.size() == h, ErrorCode::kShapeMismatch,
            "LSTM state width");

    std::vector<double> z(p.bias.values().begin(), p.bias.values().end());
    gemv_add(p.input_weights, x, z);
    gemv_add(p.recurrent_weights, prev.hidden, z);

    LstmCellResult r;
    auto& c = r.cache;
    c.input.assign(x.begin(), x.end());
    c.prev_hidden = prev.hidden;
    c.prev_cell = prev.cell;
    c.forget.resize(h);
    c.input_gate.resize(h);
    c.candidate.resize(h);
    c.output_gate.resize(h);
    c.cell.resize(h);
    c.cell_tanh.resize(h);
    r.next.hidden.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
        c.forget[j] = sigmoid(z[j]);
        c.input_gate[j] = sigmoid(z[h + j]);
        c.candidate[j] = std::tanh(z[2 * h + j]);
        c.output_gate[j] = sigmoid(z[3 * h + j]);
        c.cell[j] = c.forget[j] * prev.cell[j] + c.input_gate[j] * c.candidate[j];
        c.cell_tanh[j] = std::tanh(c.cell[j]);
        r.next.hidden[j] = c.output_gate[j] * c.cell_tanh[j];
    }
    r.next.cell = c.cell;
    return r;
}

Tensor LstmSequenceResult::hidden_sequence() const {
    const std::size_t t = states.size();
    const std::size_t h = t ? states.front().hidden.size() : 0;
    Tensor out({t, h});
    for (std::size_t s = 0; s < t; ++s) {
        std::copy(states[s].hidden.begin(), states[s].hidden.end(), out.row(s).begin());
    }
    return out;
}

LstmSequenceResult lstm_sequence_forward(const Tensor& inputs, const LstmCellParams& p,
                                         const LstmStepState& initial) {
    require(inputs.rank() == 2, ErrorCode::kShapeMismatch, "LSTM inputs must be (timesteps, features)");
    require(inputs.dim(0) >= 1, ErrorCode::kShapeMismatch, "LSTM needs at least one timestep");
    LstmSequenceResult out;
    out.states.reserve(inputs.dim(0));
    out.caches.reserve(inputs.dim(0));
    const LstmStepState* state = &initial;
    for (std::size_t t = 0; t < inputs.dim(0); ++t) {
        auto step = lstm_cell_forward(inputs.row(t), *state, p);
        for (double v : step.next.cell) {
            if (!std::isfinite(v)) {
                throw Error(ErrorCode::kNonFiniteActivation, "LSTM cell state at step " + std::to_string(t));
            }
        }
        out.states.push_back(std::move(step.next));
        out.caches.push_back(std::move(step.cache));
        state = &out.states.back();
    }
    return out;
}

LstmCellGrads lstm_cell_backward(std::span<const double> grad_hidden,
                                 std::span<const double> grad_cell, const LstmCellCache& cache,
                                 const LstmCellParams& p, LstmCellParams& param_grads) {
    const std::size_t h = p.hidden_size();
    require(cache.forget.size() == h && cache.input.size() == p.input_size(),
            ErrorCode::kCacheMismatch, "cache does not match LSTM parameters");
    require(param_grads.input_weights.same_shape(p.input_weights) &&
                param_grads.recurrent_weights.same_shape(p.recurrent_weights) &&
                param_grads.bias.same_shape(p.bias),
            ErrorCode::kShapeMismatch, "gradient buffer shape");
    require(grad_hidden.size() == h && grad_cell.size() == h, ErrorCode::kShapeMismatch,
            "upstream gradient width");

    std::vector<double> dz(4 * h);
    LstmCellGrads g;
    g.prev_cell.resize(h);
    for (std::size_t j = 0; j < h; ++j) {
        const double o = cache.output_gate[j];
        const double tc = cache.cell_tanh[j];
        const double dc = grad_cell[j] + grad_hidden[j] * o * (1.0 - tc * tc);
        const double f = cache.forget[j];
        const double i = cache.input_gate[j];
        const double cand = cache.candidate[j];
        dz[j] = dc * cache.prev_cell[j] * f * (1.0 - f);
        dz[h + j] = dc * cand * i * (1.0 - i);
        dz[2 * h + j] = dc * i * (1.0 - cand * cand);
        dz[3 * h + j] = grad_hidden[j] * tc * o * (1.0 - o);
        g.prev_cell[j] = dc * f;
    }
    outer_add(param_grads.input_weights, dz, cache.input);
    outer_add(param_grads.recurrent_weights, dz, cache.prev_hidden);
    auto db = param_grads.bias.values();
    for (std::size_t k = 0; k < dz.size(); ++k) {
        db[k] += dz[k];
    }
    g.input.assign(p.input_size(), 0.0);
    g.prev_hidden.assign(h, 0.0);
    gemv_transposed_add(p.input_weights, dz, g.input);
    gemv_transposed_add(p.recurrent_weights, dz, g.prev_hidden);
    return g;
}

Tensor lstm_backward(const Tensor& grad_hidden, const std::vector<LstmCellCache>& caches,
                     const LstmCellParams& p, LstmCellParams& param_grads) {
    const std::size_t h = p.hidden_size();
    const std::size_t steps = caches.size();
    require(steps >= 1, ErrorCode::kCacheMismatch, "no cached steps");
    require(grad_hidden.rank() == 2 && grad_hidden.dim(0) == steps && grad_hidden.dim(1) == h,
            ErrorCode::kCacheMismatch, "upstream gradient does not match cached steps");
    Tensor grad_inputs({steps, p.input_size()});
    std::vector<double> dh(h, 0.0);
    std::vector<double> dc(h, 0.0);
    for (std::size_t t = steps; t-- > 0;) {
        const auto upstream = grad_hidden.row(t);
        for (std::size_t j = 0; j < h; ++j) {
            dh[j] += upstream[j];
        }
        auto g = lstm_cell_backward(dh, dc, caches[t], p, param_grads);
        std::copy(g.input.begin(), g.input.end(), grad_inputs.row(t).begin());
        dh = std::move(g.prev_hidden);
        dc = std::move(g.prev_cell);
    }
    return grad_inputs;
}

Tensor lstm_backward(std::span<const double> grad_final_hidden,
                     const std::vector<LstmCellCache>& caches, const LstmCellParams& p,
                     LstmCellParams& param_grads) {
    require(!caches.empty(), ErrorCode::kCacheMismatch, "no cached steps");
    require(grad_final_hidden.size() == p.hidden_size(), ErrorCode::kShapeMismatch,
            "upstream gradient width");
    Tensor grad_hidden({caches.size(), p.hidden_size()});
    std::copy(grad_final_hidden.begin(), grad_final_hidden.end(),
              grad_hidden.row(caches.size() - 1).begin());
    return lstm_backward(grad_hidden, caches, p, param_grads);
}

}  // namespace tickerlab::nn
