#include <gtest/gtest.h>

#include <random>

#include "gradient_checks.h"
#include "oracles.h"
#include "tickerlab/error.h"
#include "tickerlab/neural/activations.h"
#include "tickerlab/neural/adam.h"
#include "tickerlab/neural/conv1d.h"
#include "tickerlab/neural/dense.h"
#include "tickerlab/neural/lstm.h"
#include "tickerlab/neural/tensor.h"

namespace {

using namespace tickerlab;
using namespace tickerlab::nn;

TEST(Tensor, ShapeAndIndexing) {
    Tensor t({2, 3, 4});
    EXPECT_EQ(t.size(), 24u);
    t.at(1, 2, 3) = 7.0;
    EXPECT_EQ(t[23], 7.0);
    EXPECT_EQ(t.row(1).size(), 12u);
    EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), Error);
    Tensor bad({1});
    bad[0] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(bad.check_finite("probe"), Error);
}

TEST(Tensor, MatrixHelpers) {
    const Tensor m({2, 3}, {1, 2, 3, 4, 5, 6});
    std::vector<double> y{1, 1};
    gemv_add(m, std::vector<double>{1, 0, -1}, y);
    EXPECT_EQ(y, (std::vector<double>{-1, -1}));
    std::vector<double> z(3, 0.0);
    gemv_transposed_add(m, std::vector<double>{1, 1}, z);
    EXPECT_EQ(z, (std::vector<double>{5, 7, 9}));
    Tensor acc({2, 3});
    outer_add(acc, std::vector<double>{1, 2}, std::vector<double>{1, 0, 3});
    EXPECT_EQ(acc, Tensor({2, 3}, {1, 0, 3, 2, 0, 6}));
}

TEST(Activations, SigmoidIsStableAtExtremes) {
    EXPECT_EQ(sigmoid(0.0), 0.5);
    EXPECT_EQ(sigmoid(-1000.0), 0.0);
    EXPECT_EQ(sigmoid(1000.0), 1.0);
    EXPECT_NEAR(sigmoid(2.0) + sigmoid(-2.0), 1.0, 1e-15);
    EXPECT_EQ(relu(-3.0), 0.0);
    EXPECT_EQ(relu(3.0), 3.0);
}

TEST(LstmCell, ZeroParamsZeroState) {
    const LstmCellParams p(1, 1);
    const auto r = lstm_cell_forward(std::vector<double>{0.7}, LstmStepState::zeros(1), p);
    EXPECT_EQ(r.next.hidden[0], 0.0);
    EXPECT_EQ(r.next.cell[0], 0.0);
}

TEST(LstmCell, ZeroParamsUnitCell) {
    const LstmCellParams p(1, 1);
    const LstmStepState prev{{0.0}, {1.0}};
    const auto r = lstm_cell_forward(std::vector<double>{0.0}, prev, p);
    EXPECT_DOUBLE_EQ(r.next.cell[0], 0.5);
    EXPECT_DOUBLE_EQ(r.next.hidden[0], 0.5 * std::tanh(0.5));
    EXPECT_NEAR(r.next.hidden[0], 0.23106, 1e-5);
}

TEST(LstmCell, HiddenBoundedByOne) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        LstmCellParams p(1, 4);
        for (Tensor* t : p.tensors()) oracle::randomize(*t, rng, 5.0);
        const LstmStepState prev{oracle::random_vector(rng, 4), oracle::random_vector(rng, 4, -10, 10)};
        const auto r = lstm_cell_forward(oracle::random_vector(rng, 1, -10, 10), prev, p);
        for (double h : r.next.hidden) {
            ASSERT_LE(std::abs(h), 1.0);
        }
    }
}

TEST(LstmCell, GateLayout) {
    // Only the candidate block sees the input: c' = i * tanh(x) with i = 1/2.
    LstmCellParams p(1, 1);
    p.gate_input_weights(Gate::kCandidate)[0] = 1.0;
    const auto r = lstm_cell_forward(std::vector<double>{0.3}, LstmStepState::zeros(1), p);
    EXPECT_DOUBLE_EQ(r.next.cell[0], 0.5 * std::tanh(0.3));
    EXPECT_EQ(p.input_weights.at(2, 0), 1.0);
}

TEST(LstmSequence, SingleStepMatchesCell) {
    std::mt19937_64 rng(42);
    LstmCellParams p(2, 3);
    for (Tensor* t : p.tensors()) oracle::randomize(*t, rng);
    const Tensor x = oracle::random_tensor({1, 2}, rng);
    const auto seq = lstm_sequence_forward(x, p, LstmStepState::zeros(3));
    const auto cell = lstm_cell_forward(x.row(0), LstmStepState::zeros(3), p);
    EXPECT_EQ(seq.final_hidden(), cell.next.hidden);
    EXPECT_EQ(seq.states.back().cell, cell.next.cell);
}

TEST(LstmSequence, ZeroInputsZeroParams) {
    const LstmCellParams p(1, 2);
    const auto seq = lstm_sequence_forward(Tensor({3, 1}), p, LstmStepState::zeros(2));
    EXPECT_EQ(seq.final_hidden(), (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(seq.states.size(), 3u);
}

TEST(LstmSequence, OrderSensitive) {
    std::mt19937_64 rng(43);
    LstmCellParams p(1, 4);
    for (Tensor* t : p.tensors()) oracle::randomize(*t, rng);
    const Tensor x({3, 1}, {0.1, 0.5, 0.9});
    const Tensor reversed({3, 1}, {0.9, 0.5, 0.1});
    EXPECT_NE(lstm_sequence_forward(x, p, LstmStepState::zeros(4)).final_hidden(),
              lstm_sequence_forward(reversed, p, LstmStepState::zeros(4)).final_hidden());
}

TEST(LstmBackward, ZeroUpstreamGivesZeroGradients) {
    std::mt19937_64 rng(44);
    LstmCellParams p(1, 3);
    for (Tensor* t : p.tensors()) oracle::randomize(*t, rng);
    const auto seq = lstm_sequence_forward(oracle::random_tensor({3, 1}, rng), p, LstmStepState::zeros(3));
    LstmCellParams grads(1, 3);
    const Tensor dx = lstm_backward(Tensor({3, 3}), seq.caches, p, grads);
    for (const Tensor* t : std::as_const(grads).tensors()) {
        for (double v : t->values()) ASSERT_EQ(v, 0.0);
    }
    for (double v : dx.values()) ASSERT_EQ(v, 0.0);
}

TEST(LstmBackward, DoublingUpstreamDoublesGradients) {
    std::mt19937_64 rng(45);
    LstmCellParams p(1, 3);
    for (Tensor* t : p.tensors()) oracle::randomize(*t, rng);
    const auto seq = lstm_sequence_forward(oracle::random_tensor({3, 1}, rng), p, LstmStepState::zeros(3));
    const auto g = oracle::random_vector(rng, 3);
    std::vector<double> g2 = g;
    for (double& v : g2) v *= 2.0;
    LstmCellParams once(1, 3);
    LstmCellParams twice(1, 3);
    lstm_backward(g, seq.caches, p, once);
    lstm_backward(g2, seq.caches, p, twice);
    const auto a = std::as_const(once).tensors();
    const auto b = std::as_const(twice).tensors();
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a[i]->size(); ++j) {
            EXPECT_NEAR((*b[i])[j], 2.0 * (*a[i])[j], 1e-14 * (1.0 + std::abs((*a[i])[j])));
        }
    }
}

TEST(LstmBackward, FinalHiddenOverloadMatchesMatrixForm) {
    std::mt19937_64 rng(46);
    LstmCellParams p(2, 3);
    for (Tensor* t : p.tensors()) oracle::randomize(*t, rng);
    const auto seq = lstm_sequence_forward(oracle::random_tensor({4, 2}, rng), p, LstmStepState::zeros(3));
    const auto g = oracle::random_vector(rng, 3);
    Tensor gm({4, 3});
    std::copy(g.begin(), g.end(), gm.row(3).begin());
    LstmCellParams a(2, 3);
    LstmCellParams b(2, 3);
    EXPECT_EQ(lstm_backward(g, seq.caches, p, a), lstm_backward(gm, seq.caches, p, b));
    EXPECT_EQ(a, b);
}

TEST(LstmBackward, CacheMismatch) {
    const LstmCellParams p(1, 2);
    const auto seq = lstm_sequence_forward(Tensor({3, 1}), p, LstmStepState::zeros(2));
    LstmCellParams grads(1, 2);
    EXPECT_THROW(lstm_backward(Tensor({2, 2}), seq.caches, p, grads), Error);
}

TEST(GradientCheck, LstmHidden3Input1Steps3) {
    std::mt19937_64 rng(47);
    for (int draw = 0; draw < 10; ++draw) {
        EXPECT_LT(oracle::lstm_gradient_error(rng, 1, 3, 3), 1e-4) << "draw " << draw;
    }
}

TEST(GradientCheck, LstmVariousSizes) {
    std::mt19937_64 rng(48);
    for (std::size_t input : {1u, 2u, 3u}) {
        for (std::size_t hidden : {1u, 2u, 4u}) {
            for (std::size_t steps : {1u, 2u, 4u}) {
                EXPECT_LT(oracle::lstm_gradient_error(rng, input, hidden, steps), 1e-4)
                    << input << "x" << hidden << "x" << steps;
            }
        }
    }
}

TEST(Dense, Examples) {
    DenseParams id(1, 1);
    id.weights[0] = 1.0;
    EXPECT_EQ(dense_forward(std::vector<double>{3.5}, id), (std::vector<double>{3.5}));
    DenseParams c(3, 1);
    c.bias[0] = 2.25;
    EXPECT_EQ(dense_forward(std::vector<double>{9, -4, 1}, c), (std::vector<double>{2.25}));
}

TEST(GradientCheck, Dense) {
    std::mt19937_64 rng(49);
    for (int draw = 0; draw < 10; ++draw) {
        EXPECT_LT(oracle::dense_gradient_error(rng, 1 + draw % 4, 1 + draw % 3), 1e-4);
    }
}

TEST(Conv1d, Examples) {
    Conv1dParams id(1, 1, 1);
    id.kernels[0] = 1.0;
    const Tensor pos({3, 1}, {0.5, 1.5, 2.5});
    EXPECT_EQ(conv1d_forward(pos, id).output, pos);

    Conv1dParams sum2(1, 1, 2);
    sum2.kernels.fill(1.0);
    EXPECT_EQ(conv1d_forward(Tensor({3, 1}, {1, 2, 3}), sum2).output, Tensor({2, 1}, {3, 5}));

    try {
        conv1d_forward(Tensor({1, 1}, {1}), sum2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kWindowTooSmall);
    }
}

TEST(Conv1d, NegativePreActivationsClampAndBlockGradient) {
    Conv1dParams neg(1, 1, 1);
    neg.kernels[0] = -1.0;
    const Tensor x({2, 1}, {1.0, 2.0});
    const auto fwd = conv1d_forward(x, neg);
    EXPECT_EQ(fwd.output, Tensor({2, 1}));
    Conv1dParams grads(1, 1, 1);
    const Tensor dx = conv1d_backward(x, fwd, Tensor({2, 1}, {1.0, 1.0}), neg, grads);
    EXPECT_EQ(dx, Tensor({2, 1}));
    EXPECT_EQ(grads.kernels[0], 0.0);
}

TEST(GradientCheck, Conv1d) {
    std::mt19937_64 rng(50);
    for (int draw = 0; draw < 10; ++draw) {
        const std::size_t width = 1 + draw % 3;
        EXPECT_LT(oracle::conv1d_gradient_error(rng, 1 + draw % 2, 1 + draw % 4, width, width + draw % 3), 1e-4);
    }
}

TEST(Adam, ZeroGradientLeavesParamsUnchanged) {
    Tensor p({3}, {1, -2, 3});
    auto m = AdamMoments::zeros_like(p);
    adam_update(p, Tensor({3}), m, 1, {});
    EXPECT_EQ(p, Tensor({3}, {1, -2, 3}));
}

TEST(Adam, FirstStepMovesByLearningRate) {
    for (double g : {1e-3, 0.5, 42.0, -7.0}) {
        Tensor p({1}, {0.0});
        auto m = AdamMoments::zeros_like(p);
        AdamConfig c;
        c.learning_rate = 0.01;
        adam_update(p, Tensor({1}, {g}), m, 1, c);
        // m_hat = g, v_hat = g^2: step = lr * g / (|g| + eps).
        EXPECT_NEAR(p[0], -0.01 * g / (std::abs(g) + 1e-8), 1e-15);
        EXPECT_NEAR(std::abs(p[0]), 0.01, 1e-7);
    }
}

TEST(Adam, IdenticalHistoriesIdenticalUpdates) {
    std::mt19937_64 rng(51);
    Tensor a({2}, {0.3, 0.3});
    AdamOptimizer opt({&a}, {});
    for (int s = 0; s < 50; ++s) {
        const double g = std::uniform_real_distribution<double>(-1, 1)(rng);
        const Tensor grad({2}, {g, g});
        opt.step({&grad});
        ASSERT_EQ(a[0], a[1]);
    }
    EXPECT_EQ(opt.steps_taken(), 50u);
}

TEST(Adam, MatchesScalarRecurrence) {
    Tensor p({1}, {1.0});
    AdamOptimizer opt({&p}, {0.05, 0.9, 0.999, 1e-8});
    double x = 1.0;
    double m = 0.0;
    double v = 0.0;
    for (int t = 1; t <= 20; ++t) {
        const double g = 2.0 * x;  // d/dx x^2
        const Tensor grad({1}, {g});
        opt.step({&grad});
        m = 0.9 * m + 0.1 * g;
        v = 0.999 * v + 0.001 * g * g;
        const double mh = m / (1.0 - std::pow(0.9, t));
        const double vh = v / (1.0 - std::pow(0.999, t));
        x -= 0.05 * mh / (std::sqrt(vh) + 1e-8);
        ASSERT_NEAR(p[0], x, 1e-14);
    }
}

}  // namespace
