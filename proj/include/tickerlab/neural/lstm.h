#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tickerlab/neural/tensor.h"

namespace tickerlab::nn {

// Gate blocks are stacked along the rows of every parameter tensor in this
// order, each `hidden` rows tall.
enum class Gate : std::size_t { kForget = 0, kInput = 1, kCandidate = 2, kOutput = 3 };

struct LstmCellParams {
    Tensor input_weights;      // (4 * hidden, input)   W_f, W_i, W_c, W_o
    Tensor recurrent_weights;  // (4 * hidden, hidden)  U_f, U_i, U_c, U_o
    Tensor bias;               // (4 * hidden)          b_f, b_i, b_c, b_o

    LstmCellParams() = default;
    LstmCellParams(std::size_t input, std::size_t hidden);

    std::size_t input_size() const { return input_weights.dim(1); }
    std::size_t hidden_size() const { return recurrent_weights.dim(1); }

    // Row-major view of one gate's (hidden x input) block of W.
    std::span<double> gate_input_weights(Gate gate);
    std::span<double> gate_recurrent_weights(Gate gate);
    std::span<double> gate_bias(Gate gate);

    std::vector<Tensor*> tensors() { return {&input_weights, &recurrent_weights, &bias}; }
    std::vector<const Tensor*> tensors() const {
        return {&input_weights, &recurrent_weights, &bias};
    }

    bool operator==(const LstmCellParams&) const = default;
};

struct LstmStepState {
    std::vector<double> hidden;
    std::vector<double> cell;

    static LstmStepState zeros(std::size_t hidden_size);
};

// Everything the backward pass needs from one forward step.
struct LstmCellCache {
    std::vector<double> input;
    std::vector<double> prev_hidden;
    std::vector<double> prev_cell;
    std::vector<double> forget;
    std::vector<double> input_gate;
    std::vector<double> candidate;
    std::vector<double> output_gate;
    std::vector<double> cell;
    std::vector<double> cell_tanh;
};

struct LstmCellResult {
    LstmStepState next;
    LstmCellCache cache;
};

// f = s(W_f x + U_f h + b_f), i = s(...), c~ = tanh(...), o = s(...)
// c' = f*c + i*c~, h' = o*tanh(c')
LstmCellResult lstm_cell_forward(std::span<const double> x, const LstmStepState& prev,
                                 const LstmCellParams& p);

struct LstmSequenceResult {
    std::vector<LstmStepState> states;  // state after each step
    std::vector<LstmCellCache> caches;

    const std::vector<double>& final_hidden() const { return states.back().hidden; }
    // (timesteps, hidden) matrix of per-step hidden outputs.
    Tensor hidden_sequence() const;
};

// Left fold of lstm_cell_forward over the rows of `inputs` (timesteps x features).
LstmSequenceResult lstm_sequence_forward(const Tensor& inputs, const LstmCellParams& p,
                                         const LstmStepState& initial);

// Gradient contributions of one cell step. dh/dc are the upstream gradients
// with respect to the step's output hidden and cell state.
struct LstmCellGrads {
    std::vector<double> input;
    std::vector<double> prev_hidden;
    std::vector<double> prev_cell;
};

LstmCellGrads lstm_cell_backward(std::span<const double> grad_hidden,
                                 std::span<const double> grad_cell, const LstmCellCache& cache,
                                 const LstmCellParams& p, LstmCellParams& param_grads);

// BPTT through a forward fold. `grad_hidden` is (timesteps, hidden): the loss
// gradient arriving at each step's hidden output from outside the
// recurrence. Parameter gradients are added into `param_grads`; the return
// value is the (timesteps, input) gradient with respect to the inputs.
Tensor lstm_backward(const Tensor& grad_hidden, const std::vector<LstmCellCache>& caches,
                     const LstmCellParams& p, LstmCellParams& param_grads);

// Same, with the gradient arriving only at the final hidden state.
Tensor lstm_backward(std::span<const double> grad_final_hidden,
                     const std::vector<LstmCellCache>& caches, const LstmCellParams& p,
                     LstmCellParams& param_grads);

}  // namespace tickerlab::nn
